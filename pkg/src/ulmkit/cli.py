"""Command-line front end.

Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
2 usage error. All structured output is JSON validating against the shipped
schema.json; integers that may exceed 2^53 are serialized as decimal strings
so consumers never lose precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, Union

import numpy as np

from . import selftest as selftest_mod
from . import zgroup as zg
from .duality import DualElement, cyclic_envelope, dualize
from .embed import ModuleEP, hom_height, solve_module_ep
from .linalg import FpMatrix
from .localarith import CharacterSpec, CycloContext, global_height, ulm_spectrum
from .presentation import PresentationBudget, emit, format_text
from .ulm import decompose, ulm_invariants
from .zmodule import LoadError, ZHom, load_zmod, make_cyclic, dumps_zmod

JSON_SAFE_MAX = 2**53


def json_int(n: int) -> Union[int, str]:
    """Decimal string beyond the float53 window, plain integer inside it."""
    return n if -JSON_SAFE_MAX < n < JSON_SAFE_MAX else str(n)


def _emit(doc: dict, fmt: str = "json") -> None:
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True))
    else:
        raise AssertionError("text output handled by the caller")


def _fail(message: str, path: Optional[str] = None,
          line: Optional[int] = None, col: Optional[int] = None) -> int:
    doc = {"error": message}
    if path is not None:
        doc["path"] = path
    if line is not None:
        doc["line"] = line
    if col is not None:
        doc["col"] = col
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return 1


def _parse_matrix_arg(value: str, ell: int) -> FpMatrix:
    """Rows separated by ';' with comma/space-separated entries, or a file path."""
    if ";" not in value and "," not in value:
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
        rows = [
            [int(t) for t in line.replace(",", " ").split()]
            for line in text.splitlines()
            if line.split("#", 1)[0].strip()
        ]
    else:
        rows = [
            [int(t) for t in chunk.replace(",", " ").split()]
            for chunk in value.split(";")
            if chunk.strip()
        ]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows must be nonempty and of equal length")
    return FpMatrix(ell, np.array(rows, dtype=np.int64))


def _parse_int_list(value: str) -> List[int]:
    return [int(t) for t in value.replace(",", " ").split()]


def cmd_ulm(args) -> int:
    mod = load_zmod(args.input)
    _emit({"ulm": ulm_invariants(mod)})
    return 0


def cmd_decompose(args) -> int:
    mod = load_zmod(args.input)
    deco = decompose(mod)
    mults = {}
    for n, _ in deco.parts:
        mults[n] = mults.get(n, 0) + 1
    _emit({
        "blocks": [{"n": n, "mult": mults[n]} for n in sorted(mults)],
        "basis": deco.change_of_basis.a.tolist(),
    })
    return 0


def cmd_dual(args) -> int:
    mod = load_zmod(args.input)
    text = dumps_zmod(dualize(mod))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_height(args) -> int:
    mod = load_zmod(args.input)
    coeffs = np.array(_parse_int_list(args.eta), dtype=np.int64)
    eta = DualElement(mod, coeffs)
    m, psi = cyclic_envelope(eta)
    if m == 0:
        return _fail("the zero functional has no finite envelope height")
    _emit({"m": m, "height": json_int(hom_height(psi))})
    return 0


def cmd_solve_embed(args) -> int:
    mod = load_zmod(args.input)
    phi_mat = _parse_matrix_arg(args.phi, mod.ell)
    phi = ZHom(mod, make_cyclic(mod.ell, phi_mat.rows), phi_mat)
    witness = solve_module_ep(ModuleEP(phi, args.n))
    if witness is None:
        _emit({"solvable": False, "psi": None, "surjective": None})
    else:
        _emit({
            "solvable": True,
            "psi": witness.psi.A.a.tolist(),
            "surjective": witness.surjective,
        })
    return 0


def cmd_group_ep(args) -> int:
    h = zg.load_zgrp(args.h)
    g = zg.load_zgrp(args.g)
    gamma = zg.load_zgrp(args.gamma)
    alpha = np.array(_parse_int_list(args.alpha), dtype=np.int64)
    beta = np.array(_parse_int_list(args.beta), dtype=np.int64)
    ep = zg.GroupEP(h, g, gamma, alpha, beta)
    cls = zg.classify_ep(ep, budget=args.budget)
    _emit({
        "split": cls.split,
        "frattini": cls.frattini,
        "section": cls.section.tolist() if cls.section is not None else None,
    })
    return 0


def cmd_spectrum(args) -> int:
    spec = ulm_spectrum(CycloContext(args.l), args.pmax)
    _emit({"heights": {str(h): json_int(e.witness) for h, e in spec.items()}})
    return 0


def cmd_char_height(args) -> int:
    primes = frozenset(_parse_int_list(args.ramified))
    spec = CharacterSpec(CycloContext(args.l), primes, m=args.m)
    h = global_height(spec)
    if spec.m == 1:
        _emit({"height": json_int(h), "exact": True})
    else:
        _emit({"interval": [json_int(h[0]), json_int(h[1])], "exact": False})
    return 0


def cmd_present(args) -> int:
    mult = {}
    if args.mult:
        for piece in args.mult.split(","):
            k, _, m = piece.partition("=")
            mult[int(k)] = int(m)
    budget = PresentationBudget(
        ell=args.l,
        max_level=args.N,
        cyclic_mult=mult,
        free_mult=args.free,
        truncation=args.trunc,
        is_countable=args.countable,
    )
    pres = emit(budget)
    if args.format == "text":
        sys.stdout.write(format_text(pres))
        return 0
    _emit({
        "ell": pres.ell,
        "families": [
            {"name": f.name, "kind": f.kind, "level": f.level, "size": f.size}
            for f in pres.families
        ],
        "relations": [
            {"family": r.family, "index": r.index, "rhs": list(r.rhs), "kind": r.kind}
            for r in pres.relations
        ],
        "metadata": pres.metadata,
    })
    return 0


def cmd_selftest(args) -> int:
    selected = [int(t) for t in args.criteria.split(",")] if args.criteria else None
    results = selftest_mod.run_all(selected, echo=args.format == "text")
    ok = all(r.ok for r in results)
    if args.format == "json":
        _emit({
            "results": [
                {"criterion": r.criterion, "ok": r.ok, "detail": r.detail, "seconds": r.seconds}
                for r in results
            ],
            "ok": ok,
        })
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ulmkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ulm", help="Ulm invariants of a .zmod module")
    sp.add_argument("-i", "--input", required=True)
    sp.set_defaults(fn=cmd_ulm)

    sp = sub.add_parser("decompose", help="cyclic decomposition of a .zmod module")
    sp.add_argument("-i", "--input", required=True)
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("dual", help="dual module in .zmod format")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_dual)

    sp = sub.add_parser("height", help="lifting height of a functional's cyclic envelope")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--eta", required=True, help="comma-separated coefficients")
    sp.set_defaults(fn=cmd_height)

    sp = sub.add_parser("solve-embed", help="solve a module lifting problem")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--phi", required=True,
                    help="matrix of phi: rows ';'-separated inline, or a file of rows")
    sp.add_argument("--n", type=int, required=True, help="target chain length")
    sp.set_defaults(fn=cmd_solve_embed)

    sp = sub.add_parser("group-ep", help="classify a group embedding problem")
    sp.add_argument("--h", required=True, help=".zgrp file for the source group")
    sp.add_argument("--g", required=True, help=".zgrp file for the covering group")
    sp.add_argument("--gamma", required=True, help=".zgrp file for the common quotient")
    sp.add_argument("--alpha", required=True, help="index map H -> Gamma, comma-separated")
    sp.add_argument("--beta", required=True, help="index map G -> Gamma, comma-separated")
    sp.add_argument("--budget", type=int, default=zg.SEARCH_BUDGET)
    sp.set_defaults(fn=cmd_group_ep)

    sp = sub.add_parser("spectrum", help="realized Ulm spectrum over Q with witnesses")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--pmax", type=int, required=True)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("char-height", help="global height of a tame character")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--ramified", required=True, help="comma-separated ramified primes")
    sp.add_argument("--m", type=int, default=1)
    sp.set_defaults(fn=cmd_char_height)

    sp = sub.add_parser("present", help="emit a truncated presentation")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--N", type=int, default=0)
    sp.add_argument("--mult", help="k=m pairs, comma-separated, e.g. 0=1,1=2")
    sp.add_argument("--free", type=int, default=0)
    sp.add_argument("--trunc", type=int, default=1)
    sp.add_argument("--countable", action="store_true",
                    help="annotate multiplicities as standing in for omega")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(fn=cmd_present)

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--criteria", help="comma-separated subset, e.g. 1,4,5")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(fn=cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LoadError as e:
        path = getattr(args, "input", None)
        return _fail(e.message, path=path, line=e.line, col=e.col)
    except FileNotFoundError as e:
        return _fail(f"no such file: {e.filename}", path=e.filename)
    except (ValueError, zg.GroupError, AssertionError) as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
