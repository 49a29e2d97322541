"""ulmkit: exact computational algebra for finite unipotent modules over
prime fields, with the embedding-problem, duality, and local-height toolkit
built on top, plus a presentation emitter and a CLI.
"""

from ._backend import BACKEND
from .linalg import FpMatrix, is_prime, kernel_basis, rref, solve
from .zmodule import (
    INFINITY,
    LoadError,
    ZHom,
    ZModule,
    aug_power,
    direct_sum,
    element_height,
    fixed_part,
    make_cyclic,
    make_group_algebra,
    natural_projection,
    random_module,
    random_module_with_type,
)
from .ulm import Decomposition, DecompositionError, decompose, is_pure, jordan_multiplicities, ulm_invariants
from .duality import DualElement, basic_lemma_membership, cyclic_envelope, dual_hom, dualize, generates_dual
from .embed import EPWitness, ModuleEP, hom_height, quotient_of_free, solve_module_ep
from .zgroup import (
    Classification,
    FinZGroup,
    GroupEP,
    GroupError,
    classify_ep,
    fiber_combine,
    frattini_reduce,
    frattini_solutions_proper,
    semidirect_with_Z,
    splitting_lemma_check,
    z_frattini,
)
from .localarith import (
    CharacterSpec,
    CycloContext,
    LocalPlace,
    global_height,
    local_height_interval,
    local_index,
    sieve_Pk,
    ulm_spectrum,
)
from .presentation import Presentation, PresentationBudget, emit, realize, roundtrip_check

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CharacterSpec",
    "Classification",
    "CycloContext",
    "Decomposition",
    "DecompositionError",
    "DualElement",
    "EPWitness",
    "FinZGroup",
    "FpMatrix",
    "GroupEP",
    "GroupError",
    "INFINITY",
    "LoadError",
    "LocalPlace",
    "ModuleEP",
    "Presentation",
    "PresentationBudget",
    "ZHom",
    "ZModule",
    "aug_power",
    "basic_lemma_membership",
    "classify_ep",
    "cyclic_envelope",
    "decompose",
    "direct_sum",
    "dual_hom",
    "dualize",
    "element_height",
    "emit",
    "fiber_combine",
    "fixed_part",
    "frattini_reduce",
    "frattini_solutions_proper",
    "generates_dual",
    "global_height",
    "hom_height",
    "is_prime",
    "is_pure",
    "jordan_multiplicities",
    "kernel_basis",
    "local_height_interval",
    "local_index",
    "make_cyclic",
    "make_group_algebra",
    "natural_projection",
    "quotient_of_free",
    "random_module",
    "random_module_with_type",
    "realize",
    "roundtrip_check",
    "rref",
    "semidirect_with_Z",
    "sieve_Pk",
    "solve",
    "solve_module_ep",
    "splitting_lemma_check",
    "ulm_invariants",
    "ulm_spectrum",
    "z_frattini",
]
