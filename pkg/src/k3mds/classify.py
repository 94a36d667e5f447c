"""Mori Dream Space criteria for K3 Néron–Severi lattices and admissible pairs.

A pair (L, M) is admissible when L = NS(X) is not on the finite-automorphism
list, M = N⊥ ⊂ L for a (−2)-class N is on the list, and L has no class v with
v² = −2 and v·N = 1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import linalg
from .binary import is_square, isotropic_vector, negative_pell, represents_minus2
from .discriminant import genus_equal
from .lattice import Lattice, LatticeError, direct_sum, parse_spec, rank_one
from .overlattice import even_overlattices, orthogonal_complement, overlattice_from_glue
from .represent import ReprConfig, ReprVerdict, minus2_dot1_exists

ENTRY_RANKS = range(1, 20)


class KondoError(LatticeError):
    pass


@dataclass(frozen=True)
class KondoEntry:
    rank: int
    spec: str
    lattice: Lattice = field(repr=False)


@dataclass(frozen=True)
class KondoList:
    entries: tuple[KondoEntry, ...]
    covered: frozenset[int]
    source: str = ""

    @classmethod
    def parse(cls, text: str, source: str = "") -> "KondoList":
        entries = []
        covered: set[int] = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("#!"):
                m = re.fullmatch(r"#!\s*covers\s+(\d+)\s*-\s*(\d+)", line)
                if not m:
                    raise KondoError(f"{source}:{lineno}: unknown directive {line!r}")
                covered.update(range(int(m.group(1)), int(m.group(2)) + 1))
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split(None, 1)
            if len(parts) != 2 or not parts[0].isdigit():
                raise KondoError(f"{source}:{lineno}: expected '<rank> <spec>'")
            rank, spec = int(parts[0]), parts[1].strip()
            if rank not in ENTRY_RANKS:
                raise KondoError(f"{source}:{lineno}: rank {rank} outside 1..19")
            lat = parse_spec(spec)
            if lat.rank != rank:
                raise KondoError(f"{source}:{lineno}: {spec} has rank {lat.rank}, not {rank}")
            if lat.signature() != (1, rank - 1, 0):
                raise KondoError(f"{source}:{lineno}: {spec} is not hyperbolic")
            entries.append(KondoEntry(rank, spec, lat))
            covered.add(rank)
        return cls(tuple(entries), frozenset(covered), source)

    @classmethod
    def load(cls, path: str | Path) -> "KondoList":
        p = Path(path)
        return cls.parse(p.read_text(encoding="utf-8"), str(p))

    @classmethod
    def bundled(cls) -> "KondoList":
        text = resources.files("k3mds").joinpath("data/kondo-r9plus").read_text(encoding="utf-8")
        return cls.parse(text, "k3mds/data/kondo-r9plus")

    def at_rank(self, rank: int) -> list[KondoEntry]:
        return [e for e in self.entries if e.rank == rank]

    def covers(self, rank: int) -> bool:
        return rank in self.covered


# ---------------------------------------------------------------------------
# Mori Dream criterion


@dataclass(frozen=True)
class MdsVerdict:
    kind: str  # "mds" | "not_mds" | "unknown"
    reason: str
    entry: str | None = None


def _require_hyperbolic(L: Lattice) -> None:
    if L.signature() != (1, L.rank - 1, 0):
        raise LatticeError(f"{L} is not hyperbolic (signature {L.signature()})")


def is_mds_ns(L: Lattice, kondo: KondoList) -> MdsVerdict:
    _require_hyperbolic(L)
    if L.rank == 1:
        return MdsVerdict("mds", "Picard number 1")
    if L.rank == 2:
        (a, b), (_, c) = L.gram
        iso = isotropic_vector(a, b, c)
        if iso.kind == "Witness":
            return MdsVerdict("mds", f"represents 0 by {list(iso.vector)}")
        m2 = represents_minus2(a, b, c)
        if m2.kind == "Witness":
            return MdsVerdict("mds", f"represents -2 by {list(m2.vector)}")
        if m2.kind == "NoneExhaustive":
            return MdsVerdict("not_mds", "represents neither 0 nor -2")
        return MdsVerdict("unknown", f"-2 test: {m2.describe()}")
    if not kondo.covers(L.rank):
        return MdsVerdict("unknown", f"finite-automorphism list does not cover rank {L.rank}")
    inconclusive = []
    for e in kondo.at_rank(L.rank):
        v = genus_equal(L, e.lattice)
        if v.kind == "yes":
            return MdsVerdict("mds", f"genus-equal to list entry {e.spec}", e.spec)
        if v.kind == "inconclusive":
            inconclusive.append(e.spec)
    if inconclusive:
        return MdsVerdict("unknown", "genus comparison inconclusive against " + ", ".join(inconclusive))
    return MdsVerdict("not_mds", f"not genus-equal to any rank-{L.rank} list entry")


# ---------------------------------------------------------------------------
# admissible pairs


@dataclass(frozen=True)
class Candidate:
    lattice: Lattice
    index: int
    N: tuple[int, ...]
    glues: tuple[tuple[Fraction, ...], ...]
    L_in_list: bool | None
    M_in_list: bool | None
    bx: ReprVerdict
    admissible: str  # "yes" | "no" | "unknown"
    reasons: tuple[str, ...]
    L_label: str = ""


@dataclass(frozen=True)
class PairVerdict:
    M: Lattice
    candidates: tuple[Candidate, ...]

    @property
    def admissible(self) -> list[Candidate]:
        return [c for c in self.candidates if c.admissible == "yes"]


def _membership(v: MdsVerdict) -> bool | None:
    return {"mds": True, "not_mds": False}.get(v.kind)


def _n_in_basis(basis: Sequence[Sequence[Fraction]], N_base: Sequence[int]) -> list[int]:
    c = linalg.solve_rational(linalg.transpose(basis), N_base)
    assert c is not None and all(x.denominator == 1 for x in c)
    return [int(x) for x in c]


def _assemble(L_in, M_in, bx) -> tuple[str, list[str]]:
    reasons = []
    if L_in is True:
        reasons.append("L is on the finite-automorphism list, so X is a Mori Dream Space")
    elif L_in is None:
        reasons.append("membership of L undecided")
    if M_in is False:
        reasons.append("M is not on the finite-automorphism list")
    elif M_in is None:
        reasons.append("membership of M undecided")
    if bx.kind == "Witness":
        reasons.append(f"a class v with v² = -2, v·N = 1 exists: {list(bx.vector)}")
    elif bx.kind == "Unknown":
        reasons.append("B_X condition undecided")
    if L_in is False and M_in is True and bx.obstructed:
        return "yes", ["L off the list, M on the list, B_X obstructed: " + bx.describe()]
    if L_in is True or M_in is False or bx.kind == "Witness":
        return "no", reasons
    return "unknown", reasons


def classify_pair(M: Lattice, kondo: KondoList, config: ReprConfig | None = None) -> PairVerdict:
    """All candidates L ⊇ M ⊕ ZN (index 1 or 2) and their admissibility."""
    _require_hyperbolic(M)
    M_in = _membership(is_mds_ns(M, kondo))
    base = direct_sum(M, rank_one(-2), label=f"{M.label}+A1" if M.label else "")
    n = base.rank
    N_base = [0] * (n - 1) + [1]
    out: list[Candidate] = []

    L_in = _membership(is_mds_ns(base, kondo))
    bx = minus2_dot1_exists(base, N_base, config)
    kind, reasons = _assemble(L_in, M_in, bx)
    out.append(Candidate(base, 1, tuple(N_base), (), L_in, M_in, bx, kind, tuple(reasons), base.label))

    # glue must meet N: a glue inside M ⊗ Q would leave N⊥ ≠ M
    def meets_n(g) -> bool:
        return Fraction(g[-1]).denominator == 2

    for res in even_overlattices(base, 2, glue_filter=meets_n):
        L = res.lattice
        L_in = _membership(is_mds_ns(L, kondo))
        N = _n_in_basis(res.basis, N_base)
        bx = minus2_dot1_exists(L, N, config)
        if L_in is False and M_in is True and not bx.obstructed:
            # any presentation with an obstruction makes the class admissible
            for g in res.glues[1:]:
                lat_g, basis_g, _ = overlattice_from_glue(base, [g])
                N_g = _n_in_basis(basis_g, N_base)
                bx_g = minus2_dot1_exists(lat_g, N_g, config)
                if bx_g.obstructed:
                    L, N, bx = lat_g, N_g, bx_g
                    break
        kind, reasons = _assemble(L_in, M_in, bx)
        if res.flags:
            reasons = list(reasons) + list(res.flags)
        out.append(Candidate(L, 2, tuple(N), res.glues, L_in, M_in, bx, kind, tuple(reasons),
                             f"({base.label})+glue" if base.label else ""))
    return PairVerdict(M, tuple(out))


# ---------------------------------------------------------------------------
# Table 1

EXPECTED_TABLE1: tuple[tuple[int, str, str], ...] = (
    (20, "U+E8^2+A1^2", "U+E8^2+A1"),
    (18, "U+E8+E7+A1", "U+E8+E7"),
    (17, "U+E8+D6+A1", "U+E8+D6"),
    (16, "U+E8+D4+A1^2", "U+E8+D4+A1"),
    (15, "U+E8+A1^5", "U+D8+D4"),
    (15, "U+E8+A1^5", "U+E8+A1^4"),
    (14, "U+E7+A1^5", "U+E7+A1^4"),
    (14, "U+E8+A3+A1", "U+E8+A3"),
    (13, "U+D6+A1^5", "U+D6+A1^4"),
    (13, "U+E8+A2+A1", "U+E8+A2"),
    (12, "U+D4+A1^6", "U+D4+A1^5"),
    (11, "U+E6+A2+A1", "U+E6+A2"),
    (11, "U+A1^9", "U+A1^8"),
    (10, "U(2)+A1^8", "U(2)+A1^7"),
    (10, "U+E8(2)", "U(2)+A1^7"),
    (10, "U+A7+A1", "U+A7"),
    (10, "U+D4+A3+A1", "U+D4+A3"),
    (10, "U+D5+A2+A1", "U+D5+A2"),
    (10, "U+D7+A1", "U+D7"),
    (10, "U+E6+A1+A1", "U+E6+A1"),
)


@dataclass(frozen=True)
class TableRow:
    rho: int
    L: str
    M: str
    bx: ReprVerdict
    index: int
    matched: bool


@dataclass(frozen=True)
class Table1Result:
    rows: tuple[TableRow, ...]
    missing: tuple[tuple[int, str, str], ...]
    gaps: tuple[int, ...]
    undecided: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return (not self.missing and not self.gaps and not self.undecided
                and all(r.matched and r.bx.obstructed for r in self.rows)
                and len(self.rows) == len(EXPECTED_TABLE1))


def _match_expected(rho, L: Lattice, M: Lattice, pool: list) -> tuple[int, str, str] | None:
    for exp in pool:
        if exp[0] != rho:
            continue
        if genus_equal(parse_spec(exp[2]), M).kind != "yes":
            continue
        if genus_equal(parse_spec(exp[1]), L).kind == "yes":
            return exp
    return None


def _classify_entry(args):
    spec, kondo, config = args
    return classify_pair(parse_spec(spec), kondo, config)


def generate_table1(kondo: KondoList, rho: int | None = None, jobs: int = 1,
                    config: ReprConfig | None = None) -> Table1Result:
    gaps = tuple(r for r in range(9, 20) if not kondo.covers(r))
    entries = sorted((e for e in kondo.entries if e.rank >= 9),
                     key=lambda e: (-e.rank, e.spec))
    if rho is not None:
        entries = [e for e in entries if e.rank == rho - 1]
    work = [(e.spec, kondo, config) for e in entries]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            verdicts = list(ex.map(_classify_entry, work))
    else:
        verdicts = [_classify_entry(w) for w in work]
    pool = [e for e in EXPECTED_TABLE1 if rho is None or e[0] == rho]
    rows: list[TableRow] = []
    undecided: list[str] = []
    for e, pv in zip(entries, verdicts):
        for cand in pv.candidates:
            if cand.admissible == "unknown":
                undecided.append(f"{e.spec}: {'; '.join(cand.reasons)}")
            if cand.admissible != "yes":
                continue
            r = cand.lattice.rank
            exp = _match_expected(r, cand.lattice, pv.M, pool)
            if exp is not None:
                pool.remove(exp)
                rows.append(TableRow(r, exp[1], exp[2], cand.bx, cand.index, True))
            else:
                rows.append(TableRow(r, cand.L_label or str(cand.lattice), e.spec, cand.bx,
                                     cand.index, False))
    return Table1Result(tuple(rows), tuple(pool), gaps, tuple(undecided))


# ---------------------------------------------------------------------------
# the S_d and Q_d families


def sd_lattice(d: int) -> Lattice:
    """NS(S_d) on the basis F, s0, s1 (s0·s1 = d − 2)."""
    return Lattice([[0, 1, 1], [1, -2, d - 2], [1, d - 2, -2]], ("F", "s0", "s1"), f"NS(S_{d})")


def sd_b_lattice(d: int) -> Lattice:
    """NS(S_d) ≅ U ⊕ <−2d> on the basis b1, b2, b3."""
    return Lattice([[0, 1, 0], [1, 0, 0], [0, 0, -2 * d]], ("b1", "b2", "b3"), f"U+<-{2 * d}>")


def section_class(d: int, n: int) -> list[int]:
    """s_n = (d n² − 1) b1 + b2 + n b3; s_0 = b2 − b1 and F = b1."""
    return [d * n * n - 1, 1, n]


def qd_lattice(d: int) -> Lattice:
    return Lattice([[2, 0, 0], [0, -2 * d, 0], [0, 0, -2]], ("h", "n", "N"),
                   f"<2>+<-{2 * d}>+<-2>")


def yd_lattice(d: int) -> Lattice:
    return Lattice([[2, 0], [0, -2 * d]], ("h", "n"), f"<2>+<-{2 * d}>")


@dataclass(frozen=True)
class FamilyVerdict:
    d: int
    mode: str
    contracted_ns: Lattice
    y_mds: str  # "yes" | "no" | "unknown"
    bx: ReprVerdict
    verdict: str
    reasons: tuple[str, ...]
    complement_basis: tuple[tuple[int, ...], ...] = ()


def yd_is_mds(d: int) -> tuple[str, str]:
    """<2> ⊕ <−2d> is MDS iff it represents 0 (d square) or −2 (negative Pell)."""
    if is_square(d):
        r = math.isqrt(d)
        return "yes", f"d = {r}² is a square: (x, y) = ({r}, 1) is isotropic"
    pell = negative_pell(d)
    if pell.solvable:
        return "yes", f"x² − {d}y² = −1 has the solution {pell.solution}"
    return "no", f"d is not a square and x² − {d}y² = −1 has no solution (period {len(pell.period)})"


S_D_NOT_MDS = ("S_d is not a Mori Dream Space: translation by the section s1 is an "
               "automorphism of infinite order (cited fact)")


def family_verdict(d: int, mode: str, kondo: KondoList | None = None,
                   config: ReprConfig | None = None) -> FamilyVerdict:
    mode = mode.lower()
    if mode == "sd":
        if d < 2:
            raise LatticeError("d must be at least 2 for S_d: for d = 1 the section s1 meets "
                               "s0 negatively and the fibration has a fiber of type I_2")
        NS = sd_lattice(d)
        s1 = NS.vector(s1=1)
        comp = orthogonal_complement(NS, [s1])
        bx = minus2_dot1_exists(NS, s1, config)
        y, why = yd_is_mds(d)
        reasons = [S_D_NOT_MDS]
        if bx.kind == "Witness":
            verdict = "inapplicable"
            reasons.append(f"B_X witness {_name(NS, bx.vector)} with v·s1 = 1")
        elif not bx.obstructed:
            verdict = "unknown"
            reasons.append("B_X condition undecided: " + bx.describe())
        else:
            reasons.append("no class v with v² = −2, v·s1 = 1: " + bx.describe())
            reasons.append(why)
            verdict = "admissible" if y == "yes" else "not-admissible"
        return FamilyVerdict(d, "Sd", yd_lattice(d), y, bx, verdict, tuple(reasons),
                             comp.basis)
    if mode == "qd":
        if d < 1:
            raise LatticeError("d must be positive")
        Q = qd_lattice(d)
        bx = minus2_dot1_exists(Q, Q.vector(N=1), config)
        y, why = yd_is_mds(d)
        reasons = [why, "B_X: " + bx.describe()]
        if bx.kind == "Witness":
            verdict = "inapplicable"
        elif not bx.obstructed:
            verdict = "unknown"
        elif y != "yes":
            verdict = "not-admissible"
            reasons.append("Q'_d is not a Mori Dream Space")
        else:
            q_mds = is_mds_ns(Q, kondo) if kondo is not None else MdsVerdict(
                "unknown", "no finite-automorphism list supplied")
            if q_mds.kind == "not_mds":
                verdict = "admissible"
            elif q_mds.kind == "mds":
                verdict = "not-admissible"
                reasons.append("Q_d itself is a Mori Dream Space")
            else:
                verdict = "admissible-conditional"
                reasons.append("admissible provided Q_d is not on the rank-3 finite list ("
                               + q_mds.reason + ")")
        return FamilyVerdict(d, "Qd", yd_lattice(d), y, bx, verdict, tuple(reasons))
    raise LatticeError(f"unknown mode {mode!r}; expected Sd or Qd")


def _name(L: Lattice, v) -> str:
    terms = []
    for c, name in zip(v, L.basis_names):
        if c == 0:
            continue
        if c == 1:
            terms.append(name)
        elif c == -1:
            terms.append(f"-{name}")
        else:
            terms.append(f"{c}{name}")
    return "+".join(terms).replace("+-", "-") or "0"


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class IsometryReport:
    matrix: tuple[tuple[int, ...], ...]
    is_isometry: bool
    order: int | None  # None means infinite
    char_poly: tuple[int, ...]
    cyclotomic: tuple[int, ...]
    residual: tuple[int, ...]

    @property
    def finite(self) -> bool:
        return self.order is not None

    def describe_order(self) -> str:
        return f"Finite({self.order})" if self.finite else "Infinite"


def char_poly(M: Sequence[Sequence[int]]) -> list[int]:
    """Coefficients of det(xI − M), highest degree first (Faddeev–LeVerrier)."""
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A·M_{k−1} + c_{k−1}·I
        Mk = linalg.mat_mul(A, Mk)
        for i in range(n):
            Mk[i][i] += c
        AM = linalg.mat_mul(A, Mk)
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
    assert all(x.denominator == 1 for x in coeffs)
    return [int(x) for x in coeffs]


def _poly_divmod(p: list[int], q: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic q, coefficients highest first."""
    p = list(p)
    out = []
    while len(p) >= len(q):
        f = p[0]
        out.append(f)
        for i in range(len(q)):
            p[i] -= f * q[i]
        p.pop(0)
    return out, p


def cyclotomic(k: int) -> list[int]:
    num = [1] + [0] * (k - 1) + [-1]
    for d in range(1, k):
        if k % d == 0:
            num, rem = _poly_divmod(num, cyclotomic(d))
            assert not any(rem)
    return num


def _phi(k: int) -> int:
    return sum(1 for j in range(1, k + 1) if math.gcd(j, k) == 1)


def _mat_pow(M, e):
    n = len(M)
    R = linalg.identity(n)
    B = [list(r) for r in M]
    while e:
        if e & 1:
            R = linalg.mat_mul(R, B)
        B = linalg.mat_mul(B, B)
        e >>= 1
    return R


def isometry_tools(matrix: Sequence[Sequence[int]], L: Lattice) -> IsometryReport:
    """Columns are images of basis vectors; isometry means Mᵀ·G·M = G."""
    n = L.rank
    M = [[int(x) for x in row] for row in matrix]
    if len(M) != n or any(len(r) != n for r in M):
        raise LatticeError(f"matrix must be {n}x{n}")
    G = L.G
    iso = linalg.mat_mul(linalg.mat_mul(linalg.transpose(M), G), M) == G
    cp = char_poly(M)
    residual = cp
    found = []
    for k in range(1, 4 * n * n + 2):
        if _phi(k) > n:
            continue
        ck = cyclotomic(k)
        while len(residual) >= len(ck):
            quo, rem = _poly_divmod(residual, ck)
            if any(rem):
                break
            residual = quo
            found.append(k)
    order = None
    if len(residual) == 1:
        lcm = 1
        for k in found:
            lcm = math.lcm(lcm, k)
        I = linalg.identity(n)
        if _mat_pow(M, lcm) == I:
            order = min(k for k in range(1, lcm + 1) if lcm % k == 0 and _mat_pow(M, k) == I)
    return IsometryReport(tuple(tuple(r) for r in M), iso, order, tuple(cp),
                          tuple(found), tuple(residual))


def restrict(matrix: Sequence[Sequence[int]], L: Lattice, basis: Sequence[Sequence[int]]) -> list[list[int]]:
    """Matrix of the map on span(basis) (columns are images), if the span is invariant."""
    M = [[int(x) for x in row] for row in matrix]
    BT = linalg.transpose([list(b) for b in basis])
    cols = []
    for b in basis:
        img = linalg.mat_vec(M, b)
        c = linalg.solve_rational(BT, img)
        if c is None or any(Fraction(x).denominator != 1 for x in c):
            raise LatticeError("sublattice is not invariant under the matrix")
        cols.append([int(x) for x in c])
    return linalg.transpose(cols)
