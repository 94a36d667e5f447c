"""Command-line interface: ``k3mds <command> ...``.

Exit codes: 0 success, 1 expectation mismatch (table1), 2 usage error,
3 data file missing, 4 inconclusive result under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .classify import (KondoList, classify_pair, family_verdict, generate_table1,
                       isometry_tools, restrict)
from .discriminant import discriminant_form
from .lattice import LatticeError, invariants, parse_spec
from .overlattice import even_overlattices, orthogonal_complement
from .represent import DEFAULT_BOUND, DEFAULT_MODULI, ConstraintSystem, ReprConfig, represents

SCHEMA = 1


class UsageError(Exception):
    pass


class DataMissing(Exception):
    pass


@dataclass
class Report:
    command: list[str]
    result: Any = None
    warnings: list[str] = field(default_factory=list)
    exit_code: int = 0
    text: list[str] = field(default_factory=list)
    inconclusive: bool = False

    def payload(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "result": self.result,
                "warnings": self.warnings, "exit_code": self.exit_code}


# ---------------------------------------------------------------------------
# plain-data conversion


def _num(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec(v):
    return None if v is None else [_num(x) for x in v]


def _verdict(v) -> dict:
    return {"kind": v.kind, "text": v.describe(), "vector": _vec(v.vector), "modulus": v.modulus,
            "norm_modulus": v.norm_modulus, "bound": v.bound, "strategy": v.strategy,
            "notes": list(v.notes)}


def _parse_vector(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad vector {text!r}: expected comma-separated integers or p/q") from None


def _parse_vectors(items: Sequence[str]) -> list[list[Fraction]]:
    out = []
    for item in items:
        for part in item.split(";"):
            if part.strip():
                out.append(_parse_vector(part))
    return out


def _integral(v: Sequence[Fraction]) -> list[int]:
    if any(x.denominator != 1 for x in v):
        raise UsageError("vector must be integral here")
    return [int(x) for x in v]


def _load_kondo(path: str | None) -> KondoList:
    if path is None:
        return KondoList.bundled()
    try:
        return KondoList.load(path)
    except FileNotFoundError:
        raise DataMissing(f"data file not found: {path}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_lattice(args, rep: Report):
    L = parse_spec(args.spec)
    inv = invariants(L)
    res = {"spec": args.spec, "label": L.label, "rank": inv.rank,
           "signature": list(inv.signature), "determinant": inv.determinant,
           "even": inv.even, "hyperbolic": inv.hyperbolic}
    rep.text.append(f"{L.label}: rank {inv.rank}, signature {inv.signature[:2]}, "
                    f"det {inv.determinant}, {'even' if inv.even else 'odd'}"
                    + (", hyperbolic" if inv.hyperbolic else ""))
    if args.disc:
        f = discriminant_form(L)
        res["discriminant"] = {
            "group": f.structure(),
            "invariant_factors": list(f.invariant_factors),
            "q_generators": [_num(x) for x in f.q_gens],
            "b_matrix": [[_num(x) for x in row] for row in f.b_matrix],
            "generator_lifts": [_vec(g) for g in f.lifts or ()],
            "integral_q": f.is_integral(),
        }
        rep.text.append(f"discriminant group {f.structure()}")
        rep.text.append("q on generators: " + ", ".join(str(_num(x)) for x in f.q_gens)
                        + (" (integral q)" if f.is_integral() else ""))
    if not args.disc or args.invariants:
        rep.text.append(f"basis: {', '.join(L.basis_names)}")
        res["gram"] = [list(r) for r in L.gram]
        res["basis_names"] = list(L.basis_names)
    rep.result = res


def cmd_overlattices(args, rep: Report):
    L = parse_spec(args.spec)
    results = even_overlattices(L, args.index)
    out = []
    for r in results:
        out.append({"gram": [list(x) for x in r.lattice.gram], "glue": _vec(r.glue),
                    "glue_count": len(r.glues), "index": r.index, "integral_q": r.integral_q,
                    "determinant": r.lattice.det(), "flags": list(r.flags)})
        rep.text.append(f"class: det {r.lattice.det()}, glue {_vec(r.glue)}, "
                        f"{len(r.glues)} glue vector(s), integral q: {r.integral_q}")
        if r.flags:
            rep.inconclusive = True
    if not results:
        rep.text.append(f"no even overlattices of index {args.index}")
    rep.result = {"spec": args.spec, "index": args.index, "classes": out}


def cmd_complement(args, rep: Report):
    L = parse_spec(args.spec)
    vecs = _parse_vectors(args.vectors)
    for v in vecs:
        if len(v) != L.rank:
            raise UsageError(f"vector {_vec(v)} has length {len(v)}, lattice rank is {L.rank}")
    c = orthogonal_complement(L, vecs)
    f = discriminant_form(c.lattice) if not c.degenerate else None
    rep.result = {"spec": args.spec, "basis": [list(b) for b in c.basis],
                  "gram": [list(r) for r in c.lattice.gram], "degenerate": c.degenerate,
                  "signature": list(c.lattice.signature()),
                  "discriminant_group": f.structure() if f else None}
    rep.text.append(f"complement of rank {c.lattice.rank}, signature {c.lattice.signature()[:2]}"
                    + (", degenerate" if c.degenerate else f", discriminant {f.structure()}"))
    for b in c.basis:
        rep.text.append("  " + ",".join(str(x) for x in b))


def _dot_constraint(L, item: str):
    if "=" not in item:
        raise UsageError(f"--dot expects name=value, got {item!r}")
    name, val = item.rsplit("=", 1)
    name = name.strip()
    try:
        c = int(val)
    except ValueError:
        raise UsageError(f"--dot value must be an integer: {item!r}") from None
    if name in L.basis_names:
        return L.vector({name: 1}), c
    v = _integral(_parse_vector(name))
    if len(v) != L.rank:
        raise UsageError(f"--dot vector {v} does not match rank {L.rank}")
    return v, c


def cmd_represents(args, rep: Report):
    L = parse_spec(args.spec)
    linear = [_dot_constraint(L, d) for d in args.dot or ()]
    sys_ = ConstraintSystem.build(args.target, linear, nonzero=args.nonzero)
    moduli = tuple(args.moduli) if args.moduli else DEFAULT_MODULI
    cfg = ReprConfig(moduli=moduli, bound=args.bound, half_norm=args.half_norm)
    v = represents(L, sys_, cfg)
    rep.result = {"spec": args.spec, "target": args.target, "verdict": _verdict(v)}
    rep.text.append(v.describe())
    rep.inconclusive = v.kind == "Unknown"


def _candidate(c) -> dict:
    return {"index": c.index, "L_label": c.L_label, "gram": [list(r) for r in c.lattice.gram],
            "N": list(c.N), "glues": [_vec(g) for g in c.glues], "L_in_list": c.L_in_list,
            "M_in_list": c.M_in_list, "bx": _verdict(c.bx), "admissible": c.admissible,
            "reasons": list(c.reasons)}


def cmd_classify(args, rep: Report):
    kondo = _load_kondo(args.kondo)
    M = parse_spec(args.spec)
    pv = classify_pair(M, kondo)
    rep.result = {"M": args.spec, "candidates": [_candidate(c) for c in pv.candidates],
                  "admissible_count": len(pv.admissible)}
    for c in pv.candidates:
        rep.text.append(f"index {c.index} {c.L_label}: {c.admissible} "
                        f"(B_X {c.bx.describe()}; {'; '.join(c.reasons)})")
        if c.admissible == "unknown":
            rep.inconclusive = True


def cmd_table1(args, rep: Report):
    kondo = _load_kondo(args.kondo)
    res = generate_table1(kondo, rho=args.rho, jobs=args.jobs)
    rows = [{"rho": r.rho, "L": r.L, "M": r.M, "bx": r.bx.describe(), "index": r.index,
             "matched": r.matched} for r in res.rows]
    rep.result = {"rows": rows, "row_count": len(rows), "missing": [list(m) for m in res.missing],
                  "coverage_gaps": list(res.gaps), "undecided": list(res.undecided)}
    for r in res.rows:
        mark = "ok" if r.matched else "UNEXPECTED"
        rep.text.append(f"{r.rho:>3}  {r.L:<16} {r.M:<14} {r.bx.describe():<18} {mark}")
    for m in res.missing:
        rep.warnings.append(f"expected row missing: {m}")
    for g in res.gaps:
        rep.warnings.append(f"finite-automorphism list does not cover rank {g}")
    if res.undecided:
        rep.inconclusive = True
    if args.rho is None:
        ok = res.ok
    else:
        ok = (not res.missing and not res.undecided
              and all(r.matched and r.bx.obstructed for r in res.rows))
    rep.text.append(f"{len(rows)} rows, {'all expected' if ok else 'MISMATCH'}")
    if not ok:
        rep.exit_code = 1


def cmd_family(args, rep: Report):
    if (args.sd is None) == (args.qd is None):
        raise UsageError("give exactly one of --sd d or --qd d")
    mode, d = ("Sd", args.sd) if args.sd is not None else ("Qd", args.qd)
    kondo = _load_kondo(args.kondo) if args.kondo else None
    v = family_verdict(d, mode, kondo)
    rep.result = {"d": d, "mode": mode, "verdict": v.verdict, "y_mds": v.y_mds,
                  "bx": _verdict(v.bx), "contracted_ns": [list(r) for r in v.contracted_ns.gram],
                  "reasons": list(v.reasons)}
    rep.text.append(f"{mode} d={d}: {v.verdict}")
    rep.text.extend("  " + r for r in v.reasons)
    rep.inconclusive = v.verdict in ("unknown", "admissible-conditional")


def _parse_matrix(text: str) -> list[list[int]]:
    rows = [r for r in text.split(";") if r.strip()]
    return [_integral(_parse_vector(r)) for r in rows]


def cmd_isometry(args, rep: Report):
    L = parse_spec(args.spec)
    M = _parse_matrix(args.matrix)
    r = isometry_tools(M, L)
    rep.result = {"spec": args.spec, "matrix": [list(x) for x in r.matrix],
                  "is_isometry": r.is_isometry, "order": r.order if r.finite else "infinite",
                  "char_poly": list(r.char_poly), "cyclotomic_factors": list(r.cyclotomic),
                  "residual": list(r.residual)}
    rep.text.append(f"isometry: {r.is_isometry}; order: {r.describe_order()}")
    if args.restrict:
        basis = [_integral(v) for v in _parse_vectors([args.restrict])]
        R = restrict(M, L, basis)
        rep.result["restriction"] = R
        rep.text.append("restriction: " + "; ".join(",".join(str(x) for x in row) for row in R))


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="k3mds", description="Exact lattice tools for K3 Mori Dream Space pairs.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--strict", action="store_true", help="exit 4 on inconclusive results")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("lattice", help="invariants and discriminant form of a lattice")
    s.add_argument("spec")
    s.add_argument("--disc", action="store_true")
    s.add_argument("--invariants", action="store_true")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("overlattices", help="even overlattices of prime index")
    s.add_argument("spec")
    s.add_argument("--index", type=int, default=2)
    s.set_defaults(func=cmd_overlattices)

    s = sub.add_parser("complement", help="orthogonal complement of vectors")
    s.add_argument("spec")
    s.add_argument("--vectors", action="append", required=True,
                   help="comma-separated coordinates; separate vectors with ';' or repeat")
    s.set_defaults(func=cmd_complement)

    s = sub.add_parser("represents", help="does the lattice represent a norm")
    s.add_argument("spec")
    s.add_argument("--target", type=int, required=True)
    s.add_argument("--dot", action="append", help="name=c or v1,..,vn=c")
    s.add_argument("--moduli", type=int, nargs="+")
    s.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    s.add_argument("--half-norm", action="store_true")
    s.add_argument("--nonzero", action="store_true")
    s.set_defaults(func=cmd_represents)

    s = sub.add_parser("classify", help="admissible pairs for a lattice M")
    s.add_argument("spec")
    s.add_argument("--kondo")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("table1", help="rebuild the table of admissible pairs")
    s.add_argument("--kondo")
    s.add_argument("--rho", type=int)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("family", help="verdict for the S_d or Q_d family")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--sd", type=int)
    g.add_argument("--qd", type=int)
    s.add_argument("--kondo")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("isometry", help="isometry check, order and restriction")
    s.add_argument("spec")
    s.add_argument("--matrix", required=True, help="rows separated by ';'")
    s.add_argument("--restrict", help="sublattice basis, vectors separated by ';'")
    s.set_defaults(func=cmd_isometry)
    return p


def run(argv: Sequence[str]) -> Report:
    argv = list(argv)
    rep = Report(command=argv)
    parser = build_parser()
    flags = {"--json", "--strict"}
    try:
        args = parser.parse_args([a for a in argv if a not in flags])
        args.json = "--json" in argv
        args.strict = "--strict" in argv
        if not getattr(args, "command", None):
            raise UsageError("no command given")
        args.func(args, rep)
        if args.strict and rep.inconclusive and rep.exit_code == 0:
            rep.exit_code = 4
            rep.warnings.append("inconclusive result under --strict")
    except UsageError as exc:
        rep.exit_code = 2
        rep.warnings.append(f"usage: {exc}")
    except DataMissing as exc:
        rep.exit_code = 3
        rep.warnings.append(str(exc))
    except LatticeError as exc:
        rep.exit_code = 2
        rep.warnings.append(f"error: {exc}")
    return rep


def render(rep: Report, as_json: bool) -> str:
    if as_json:
        return json.dumps(rep.payload(), sort_keys=True, indent=2, ensure_ascii=False)
    lines = list(rep.text) + [f"warning: {w}" for w in rep.warnings]
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    rep = run(argv)
    out = render(rep, "--json" in argv)
    stream = sys.stdout if rep.exit_code in (0, 1, 4) or "--json" in argv else sys.stderr
    if out:
        print(out, file=stream)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
