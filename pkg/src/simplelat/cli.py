"""Command-line entry point: ``simplelat <command> ...``.

Structures are printed as JSON, tables as TSV.  Exit status is 0 on success,
1 when a verification fails, and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from fractions import Fraction

from . import __version__


def _dump(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _genus(text: str):
    from .genus import parse_genus_symbol

    try:
        return parse_genus_symbol(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _manifest(command: str, params: dict, t0: float, **extra) -> dict:
    import numpy

    return {
        "command": command,
        "parameters": params,
        "versions": {"simplelat": __version__, "python": platform.python_version(), "numpy": numpy.__version__},
        "seconds": round(time.perf_counter() - t0, 3),
        **extra,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_dim(args) -> int:
    from .dimensions import dim_oracle, dim_report, invariants

    sym = args.genus
    rep = dim_report(sym, args.k) if args.k >= 2 else invariants(sym, args.k)
    out = rep.to_json()
    if args.oracle:
        orc = dim_oracle(sym.form, sym.signature, args.k)
        out["oracle_agrees"] = orc.invariants() == rep.invariants() and orc.dim_M == rep.dim_M and orc.dim_S == rep.dim_S
    _dump(out)
    return 0 if out.get("oracle_agrees", True) else 1


def cmd_gauss(args) -> int:
    from math import prod

    from .cyclotomic import Cyc

    sym = args.genus
    D = sym.form if args.check else None
    rows = []
    for n in args.n:
        unit = sum(c.gauss_unit(n) for c in sym.components) % 8
        order_n = prod(c.order for c in sym.components if n % c.p == 0)
        row = {"n": n, "order_n": order_n, "unit": unit, "value": f"sqrt({sym.order * order_n}) e({unit}/8)"}
        if D is not None:
            exact = Cyc.sqrt(sym.order * order_n) * Cyc.root(Fraction(unit, 8))
            row["bruteforce_agrees"] = exact == D.gauss_sum_bruteforce(n)
        rows.append(row)
    _dump({"genus": str(sym), "order": sym.order, "gauss": rows})
    return 0 if all(r.get("bruteforce_agrees", True) for r in rows) else 1


def cmd_classify(args) -> int:
    from .classify import SearchFrontier, classify_simple

    t0 = time.perf_counter()
    frontier = SearchFrontier(n_max=args.nmax)
    res = classify_simple(frontier, threads=args.threads, levels=args.level)
    print("level\tgenus\tn\tdim_S")
    for level, s, n, dim_s in res.simple:
        print(f"{level}\t{s}\t{n}\t{dim_s}")
    man = _manifest("classify", {"nmax": args.nmax, "level": args.level, "threads": args.threads}, t0, **res.manifest())
    if args.manifest:
        with open(args.manifest, "w") as fh:
            json.dump(man, fh, indent=2, default=str)
    else:
        json.dump({k: v for k, v in man.items() if k != "certificate"}, sys.stderr, default=str)
        sys.stderr.write("\n")
    return 0


def cmd_eis(args) -> int:
    from .eisenstein import level3_table, q_level1, q_level6_zero

    if args.case == "level3":
        t = level3_table(args.count)
        print("m\t" + "\t".join(t["m"]))
        print("q(gamma,m)\t" + "\t".join(str(v) for v in t["q_gamma"]))
        print("m\t" + "\t".join(str(m) for m in range(1, len(t["q_zero"]) + 1)))
        print("q(0,m)\t" + "\t".join(str(v) for v in t["q_zero"]))
    elif args.case == "level6":
        print("m\tq(0,m)")
        for m in range(1, args.count + 1):
            print(f"{m}\t{q_level6_zero(m)}")
    else:
        k = int(args.case.removeprefix("level1-k"))
        print("m\tq(0,m)")
        for m in range(1, args.count + 1):
            print(f"{m}\t{q_level1(k, m)}")
    return 0


def cmd_search(args) -> int:
    from .eisenstein import ProviderUnavailable
    from .search import search_singular

    try:
        rep = search_singular(args.genus, Fraction(args.m_floor))
    except ProviderUnavailable as exc:
        _dump({"genus": str(args.genus), "status": "provider unavailable", "reason": str(exc)})
        return 0
    _dump(rep.to_json())
    return 0


def cmd_lift(args) -> int:
    from .lifts import coefficient_formula_check, case_lift, constant_term, principal_part, verify_modularity

    F = case_lift(args.case, args.truncation)
    X = F.D.elements()
    out = F.to_json()
    out["principal_part"] = [{"gamma": [int(v) for v in X[g]], "m": str(m), "c": c} for (g, m), c in principal_part(F).terms.items()]
    out["constant_term"] = constant_term(F)
    out["integral"] = F.is_integral()
    chk = coefficient_formula_check(F, args.case)
    out["coefficient_formula_check"] = {k: v for k, v in chk.items() if k != "mismatches"}
    ok = chk["passed"] and F.is_integral()
    if args.modularity:
        mod = verify_modularity(F)
        out["modularity"] = mod
        ok &= mod["status"] != "fail"
    if not args.components:
        out.pop("components")
    _dump(out)
    return 0 if ok else 1


def cmd_expand(args) -> int:
    from .orthoprod import product_expansion_cone_case, verify_cone_case, weyl_group_expansion

    name, kind = args.case.split("-")
    if kind == "cone":
        P = product_expansion_cone_case(name, args.height)
        ver = verify_cone_case(P, name)
        out = P.to_json()
        out["verification"] = ver
        _dump(out)
        return 0 if ver["passed"] else 1
    r = weyl_group_expansion(name, args.height)
    out = {k: v for k, v in r.items() if k not in ("orbit", "product_side", "sum_side")}
    out["coefficients"] = [{"lambda": list(k), "c": v} for k, v in sorted(r["product_side"].items())]
    _dump(out)
    return 0 if r["passed"] else 1


def cmd_selftest(args) -> int:
    from .classify import EXPECTED_SIMPLE
    from .dimensions import dim_oracle, dim_report
    from .eisenstein import level3_table
    from .genus import parse_genus_symbol
    from .lifts import case_lift, constant_term
    from .search import search_singular

    checks = []
    t = level3_table(12)
    checks.append(("eisenstein table", t["q_gamma"] == [-2, -6, -18, -26, -48, -54, -100, -102, -162, -144, -240, -234] and t["q_zero"] == [-36, 0, -180, -468]))
    ok = True
    for s in EXPECTED_SIMPLE:
        sym = parse_genus_symbol(s)
        k = 1 + sym.signature[1] // 2
        ok &= dim_report(sym, k).dim_S == 0
        if sym.form.order <= 300:
            ok &= dim_oracle(sym.form, sym.signature, k).invariants() == dim_report(sym, k).invariants()
    checks.append(("simple lattices have dim S = 0", ok))
    rep = search_singular(parse_genus_symbol("II_(2,4)(3^+5)"))
    checks.append(("singular search 3^+5", len(rep.candidates) == 1 and rep.candidates[0].weight == 1))
    checks.append(("level-2 lift constant term", constant_term(case_lift("level2", 3)) == 4))
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}\t{name}")
    return 0 if all(p for _, p in checks) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simplelat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dim", help="dimensions of M_k and S_k for the dual Weil representation")
    s.add_argument("genus", type=_genus)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="also compare with the eigenvalue oracle")
    s.set_defaults(func=cmd_dim)

    s = sub.add_parser("gauss", help="Gauss sums G(n) as sqrt|D^n| e(u/8) times sqrt|D|")
    s.add_argument("genus", type=_genus)
    s.add_argument("--n", type=int, nargs="+", default=[1, 2, -2, -3])
    s.add_argument("--check", action="store_true", help="compare with the brute-force sum")
    s.set_defaults(func=cmd_gauss)

    s = sub.add_parser("classify", help="all simple lattices inside the search frontier (TSV)")
    s.add_argument("--nmax", type=int, default=34)
    s.add_argument("--level", type=int, nargs="+", default=None)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--manifest", help="write the run manifest and certificate to this file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("eis", help="Eisenstein coefficient tables (TSV)")
    s.add_argument("--case", default="level3", choices=["level3", "level6", "level1-k6", "level1-k10", "level1-k14"])
    s.add_argument("--count", type=int, default=12)
    s.set_defaults(func=cmd_eis)

    s = sub.add_parser("search-singular", help="principal parts of singular-weight products")
    s.add_argument("--genus", type=_genus, required=True)
    s.add_argument("--m-floor", default="-4")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("lift", help="the lifted vector-valued form (JSON)")
    s.add_argument("--case", choices=["level3", "level2"], required=True)
    s.add_argument("--truncation", type=int, default=10)
    s.add_argument("--modularity", action="store_true", help="numerical check at five points")
    s.add_argument("--components", action="store_true", help="include every component")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("expand-product", help="product expansion at a cusp (JSON)")
    s.add_argument("--case", choices=["level3-cone", "level3-weyl", "level2-cone", "level2-weyl"], required=True)
    s.add_argument("--height", type=int, default=6)
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("selftest", help="quick end-to-end checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be positive")
    if getattr(args, "command", None) == "search-singular":
        try:
            Fraction(args.m_floor)
        except ValueError:
            parser.error(f"invalid --m-floor {args.m_floor!r}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
