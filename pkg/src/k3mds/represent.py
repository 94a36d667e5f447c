"""Norm representability under linear and coset constraints.

Three strategies, tried in order:

a. the affine solution set is definite: exhaustive Fincke–Pohst enumeration;
b. congruence scan: a residue DP over the coordinates decides solvability
   modulo each configured modulus;
c. bounded enumeration of the affine solution set by L1 shells.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .lattice import Lattice, LatticeError, as_coords

DEFAULT_MODULI = (2, 3, 4, 8, 9, 16, 25, 27, 32)
DEFAULT_BOUND = 32
DEFAULT_STATE_CAP = 10**8
DEFAULT_SEARCH_CAP = 200_000


class ReprError(LatticeError):
    pass


@dataclass(frozen=True)
class ConstraintSystem:
    """v² = target, v·n_i = c_i, and optionally v ≡ w (mod k·L); ``nonzero`` excludes v = 0."""

    target: int
    linear: tuple[tuple[tuple[int, ...], int], ...] = ()
    coset: tuple[tuple[int, ...], int] | None = None
    nonzero: bool = False

    @classmethod
    def build(cls, target: int, linear: Iterable = (), coset=None, nonzero: bool = False):
        lin = tuple((tuple(int(x) for x in as_coords(n)), int(c)) for n, c in linear)
        cs = None
        if coset is not None:
            w, k = coset
            cs = (tuple(int(x) for x in as_coords(w)), int(k))
        return cls(int(target), lin, cs, nonzero)

    def validate(self, L: Lattice) -> None:
        if self.target % 2:
            raise ReprError(f"target {self.target} is odd; even lattices have even norms")
        for n, _ in self.linear:
            if len(n) != L.rank:
                raise ReprError("constraint vector length does not match lattice rank")
        if self.coset is not None:
            w, k = self.coset
            if len(w) != L.rank:
                raise ReprError("coset offset length does not match lattice rank")
            if k < 1:
                raise ReprError("coset modulus must be positive")


@dataclass(frozen=True)
class ReprConfig:
    moduli: tuple[int, ...] = DEFAULT_MODULI
    bound: int = DEFAULT_BOUND
    half_norm: bool = False
    state_cap: int = DEFAULT_STATE_CAP
    search_cap: int = DEFAULT_SEARCH_CAP


@dataclass(frozen=True)
class ReprVerdict:
    kind: str  # "Witness" | "ObstructedMod" | "NoneExhaustive" | "Unknown"
    vector: tuple[int, ...] | None = None
    modulus: int | None = None
    bound: int | None = None
    norm_modulus: int | None = None
    strategy: str = ""
    notes: tuple[str, ...] = field(default=())

    @property
    def obstructed(self) -> bool:
        """True when no solution exists (congruence or exhaustive certificate)."""
        return self.kind in ("ObstructedMod", "NoneExhaustive")

    def describe(self) -> str:
        if self.kind == "Witness":
            return f"Witness{list(self.vector)}"
        if self.kind == "ObstructedMod":
            return f"ObstructedMod({self.modulus})"
        if self.kind == "Unknown":
            return f"Unknown(bound={self.bound})"
        return "NoneExhaustive"

    def with_notes(self, *notes: str) -> "ReprVerdict":
        return ReprVerdict(self.kind, self.vector, self.modulus, self.bound,
                           self.norm_modulus, self.strategy, self.notes + tuple(notes))


def witness(v, strategy: str, *notes: str) -> ReprVerdict:
    return ReprVerdict("Witness", tuple(int(x) for x in v), strategy=strategy, notes=notes)


def satisfies(L: Lattice, sys: ConstraintSystem, v: Sequence[int]) -> bool:
    """Exact substitution of v into every constraint."""
    if len(v) != L.rank:
        return False
    if L.norm(v) != sys.target:
        return False
    for n, c in sys.linear:
        if L.pair(v, n) != c:
            return False
    if sys.coset is not None:
        w, k = sys.coset
        if any((vi - wi) % k for vi, wi in zip(v, w)):
            return False
    if sys.nonzero and not any(v):
        return False
    return True


# ---------------------------------------------------------------------------
# affine parametrization of the linear and coset constraints


@dataclass(frozen=True)
class AffineSet:
    """Solutions of the linear/coset part: v = p + Σ z_j·K_j with z ∈ Z^k."""

    p: tuple[int, ...]
    K: tuple[tuple[int, ...], ...]

    def point(self, z: Sequence[int]) -> list[int]:
        v = list(self.p)
        for zj, kj in zip(z, self.K):
            if zj:
                for i, x in enumerate(kj):
                    v[i] += zj * x
        return v


def affine_solutions(L: Lattice, sys: ConstraintSystem) -> AffineSet | None:
    n = L.rank
    if sys.coset is not None:
        w, k = list(sys.coset[0]), sys.coset[1]
    else:
        w, k = [0] * n, 1
    if not sys.linear:
        return AffineSet(tuple(w), tuple(tuple(k * x for x in row) for row in linalg.identity(n)))
    A = [linalg.mat_vec(L.gram, nv) for nv, _ in sys.linear]
    rhs = [c - linalg.dot(a, w) for a, (_, c) in zip(A, sys.linear)]
    u0 = linalg.solve_integer([[k * x for x in a] for a in A], rhs)
    if u0 is None:
        return None
    p = [wi + k * ui for wi, ui in zip(w, u0)]
    K = linalg.integer_kernel(A, ncols=n)
    return AffineSet(tuple(p), tuple(tuple(k * x for x in row) for row in K))


def _restricted_form(L: Lattice, aff: AffineSet):
    """(H, b, c) with norm(p + Kᵀz) = zᵀHz + 2b·z + c."""
    G = L.gram
    GK = [linalg.mat_vec(G, kj) for kj in aff.K]
    H = [[linalg.dot(ki, gkj) for gkj in GK] for ki in aff.K]
    b = [linalg.dot(aff.p, gkj) for gkj in GK]
    c = L.norm(aff.p)
    return H, b, c


# ---------------------------------------------------------------------------
# (a) exhaustive enumeration on a definite affine lattice


def _floor_plus_sqrt(center: Fraction, radius2: Fraction) -> int:
    """Largest integer m with m - center <= sqrt(radius2)."""
    m = math.floor(center + math.sqrt(float(radius2))) + 1
    while m - center > 0 and (m - center) ** 2 > radius2:
        m -= 1
    while (m + 1 - center) <= 0 or (m + 1 - center) ** 2 <= radius2:
        m += 1
    return m


def _ceil_minus_sqrt(center: Fraction, radius2: Fraction) -> int:
    """Smallest integer m with center - m <= sqrt(radius2)."""
    return -_floor_plus_sqrt(-center, radius2)


def ldl_decomposition(H: Sequence[Sequence[int]]):
    """q, mu with zᵀHz = Σ_i q_i (z_i + Σ_{j>i} mu_ij z_j)² (H positive definite)."""
    k = len(H)
    A = [[Fraction(x) for x in row] for row in H]
    q = [Fraction(0)] * k
    mu = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        q[i] = A[i][i]
        if q[i] <= 0:
            raise ReprError("form is not positive definite")
        for j in range(i + 1, k):
            mu[i][j] = A[i][j] / q[i]
        for j in range(i + 1, k):
            for l in range(j, k):
                A[j][l] -= q[i] * mu[i][j] * mu[i][l]
                A[l][j] = A[j][l]
    return q, mu


def fincke_pohst(H, b, c, target, accept=None):
    """Points z with zᵀHz + 2b·z + c = target for positive definite H.

    Yields solutions in a fixed order; ``accept`` filters them.
    """
    k = len(H)
    if k == 0:
        if c == target and (accept is None or accept([])):
            yield []
        return
    Hinv = linalg.inverse_rational(H)
    center = [-sum(Hinv[i][j] * b[j] for j in range(k)) for i in range(k)]
    R = Fraction(target - c) + sum(b[i] * Hinv[i][j] * b[j] for i in range(k) for j in range(k))
    if R < 0:
        return
    q, mu = ldl_decomposition(H)
    z = [0] * k

    def rec(i: int, rem: Fraction):
        # y_i + Σ_{j>i} mu_ij y_j with y = z − center
        shift = sum(mu[i][j] * (z[j] - center[j]) for j in range(i + 1, k))
        cen = center[i] - shift
        r2 = rem / q[i]
        lo = _ceil_minus_sqrt(cen, r2)
        hi = _floor_plus_sqrt(cen, r2)
        for zi in range(lo, hi + 1):
            t = zi - cen
            left = rem - q[i] * t * t
            if left < 0:
                continue
            z[i] = zi
            if i == 0:
                if left == 0 and (accept is None or accept(z)):
                    yield list(z)
            else:
                yield from rec(i - 1, left)
        z[i] = 0

    yield from rec(k - 1, R)


# ---------------------------------------------------------------------------
# (b) congruence scan


@dataclass(frozen=True)
class ModProblem:
    """u ∈ (Z/m)^n with uᵀQu + l·u + const ≡ target (mod M) and A·u ≡ c (mod m)."""

    Q: tuple[tuple[int, ...], ...]
    l: tuple[int, ...]
    const: int
    target: int
    A: tuple[tuple[int, ...], ...]
    c: tuple[int, ...]
    m: int
    M: int


def mod_problem(L: Lattice, sys: ConstraintSystem, m: int, half_norm: bool = False) -> ModProblem:
    n = L.rank
    if sys.coset is not None:
        w, k = list(sys.coset[0]), sys.coset[1]
    else:
        w, k = [0] * n, 1
    G = L.gram
    Gw = linalg.mat_vec(G, w)
    Q = tuple(tuple(k * k * x for x in row) for row in G)
    l = tuple(2 * k * x for x in Gw)
    const = linalg.dot(w, Gw)
    A, c = [], []
    for nv, cv in sys.linear:
        Gn = linalg.mat_vec(G, nv)
        A.append(tuple(k * x for x in Gn))
        c.append(cv - linalg.dot(w, Gn))
    # the half norm (v² − t)/2 ≡ 0 mod m is v² ≡ t mod 2m; with an even Gram and
    # even linear part it still depends only on u mod m
    M = 2 * m if half_norm else m
    return ModProblem(Q, l, const, sys.target, tuple(A), tuple(c), m, M)


def _elimination_order(Q) -> list[int]:
    n = len(Q)
    nbrs = [{j for j in range(n) if j != i and Q[i][j]} for i in range(n)]
    done: set[int] = set()
    frontier: set[int] = set()
    order: list[int] = []
    while len(order) < n:
        best, best_key = None, None
        for i in range(n):
            if i in done:
                continue
            new_front = (frontier | nbrs[i]) - done - {i}
            key = (len(new_front), i not in frontier, i)
            if best_key is None or key < best_key:
                best, best_key = i, key
        order.append(best)
        done.add(best)
        frontier = (frontier | nbrs[best]) - done
    return order


def solvable_mod(prob: ModProblem, state_cap: int = DEFAULT_STATE_CAP) -> bool | None:
    """Residue DP; None when the state space exceeds ``state_cap``."""
    m, M = prob.m, prob.M
    n = len(prob.Q)
    r = len(prob.A)
    Q = prob.Q
    order = _elimination_order(Q)
    nbrs = [[j for j in range(n) if j != i and Q[i][j]] for i in range(n)]
    done: set[int] = set()
    frontier: list[int] = []
    # state: (norm mod M, linear values mod m..., pending coefficients for frontier...)
    states = {(prob.const % M,) + (0,) * r}
    for i in order:
        idx = frontier.index(i) if i in frontier else None
        rest = [j for j in frontier if j != i]
        added = [j for j in nbrs[i] if j not in done and j not in frontier]
        new_frontier = rest + added
        rest_pos = [frontier.index(j) for j in rest]
        coef = [2 * Q[i][j] for j in new_frontier]
        qii, li = Q[i][i], prob.l[i]
        acol = [prob.A[t][i] for t in range(r)]
        new_states = set()
        for s in states:
            norm = s[0]
            lin = s[1:1 + r]
            pend = s[1 + r:]
            p_i = pend[idx] if idx is not None else 0
            kept = [pend[p] for p in rest_pos]
            for x in range(m):
                nn = (norm + qii * x * x + (p_i + li) * x) % M
                nl = tuple((lin[t] + acol[t] * x) % m for t in range(r))
                npend = tuple((kept[t] + coef[t] * x) % M for t in range(len(kept))) + \
                    tuple((coef[len(kept) + t] * x) % M for t in range(len(added)))
                new_states.add((nn,) + nl + npend)
            if len(new_states) > state_cap:
                return None
        states = new_states
        done.add(i)
        frontier = new_frontier
    goal = (prob.target % M,) + tuple(ci % m for ci in prob.c)
    return goal in states


def brute_force_mod(prob: ModProblem) -> bool:
    """Oracle: scan all of (Z/m)^n."""
    n = len(prob.Q)
    for u in itertools.product(range(prob.m), repeat=n):
        val = prob.const + sum(prob.l[i] * u[i] for i in range(n))
        val += sum(prob.Q[i][j] * u[i] * u[j] for i in range(n) for j in range(n))
        if (val - prob.target) % prob.M:
            continue
        if all((linalg.dot(a, u) - ci) % prob.m == 0 for a, ci in zip(prob.A, prob.c)):
            return True
    return False


def congruence_scan(L: Lattice, sys: ConstraintSystem, config: ReprConfig) -> tuple[ReprVerdict | None, list[str]]:
    notes = []
    for m in config.moduli:
        prob = mod_problem(L, sys, m, config.half_norm)
        ok = solvable_mod(prob, config.state_cap)
        if ok is None:
            notes.append(f"modulus {m} skipped: state cap {config.state_cap} exceeded")
            continue
        if not ok:
            return ReprVerdict("ObstructedMod", modulus=m, norm_modulus=prob.M,
                               strategy="congruence",
                               notes=tuple(notes) + (("half norm",) if config.half_norm else ())), notes
    return None, notes


# ---------------------------------------------------------------------------
# (c) bounded search


def _values_by_size(bound: int) -> list[int]:
    out = [0]
    for a in range(1, bound + 1):
        out += [a, -a]
    return out


def l1_shell(k: int, radius: int, bound: int):
    """Integer vectors of L1 norm ``radius`` with entries in [-bound, bound]."""
    if k == 0:
        if radius == 0:
            yield ()
        return
    for a in _values_by_size(min(bound, radius)):
        rem = radius - abs(a)
        if rem < 0:
            continue
        if k == 1:
            if rem == 0:
                yield (a,)
            continue
        for tail in l1_shell(k - 1, rem, bound):
            yield (a,) + tail


def bounded_search(L: Lattice, sys: ConstraintSystem, aff: AffineSet, bound: int,
                   cap: int) -> tuple[list[int] | None, int, bool]:
    """(witness, visited, complete); complete means the whole box was covered."""
    k = len(aff.K)
    visited = 0
    for radius in range(0, k * bound + 1):
        for z in l1_shell(k, radius, bound):
            visited += 1
            v = aff.point(z)
            if satisfies(L, sys, v):
                return v, visited, False
            if visited >= cap:
                return None, visited, False
    return None, visited, True


def represents(L: Lattice, sys: ConstraintSystem, config: ReprConfig | None = None) -> ReprVerdict:
    config = config or ReprConfig()
    sys.validate(L)
    aff = affine_solutions(L, sys)
    if aff is None:
        return ReprVerdict("NoneExhaustive", strategy="linear",
                           notes=("linear and coset constraints have no integer solution",))
    H, b, c = _restricted_form(L, aff)
    k = len(H)
    sig = linalg.congruence_diagonalize(H)[2] if k else (0, 0, 0)
    if sig[2] == 0 and (sig[0] == k or sig[1] == k):
        sign = 1 if sig[0] == k else -1
        Hs = [[sign * x for x in row] for row in H]
        bs = [sign * x for x in b]

        def accept(z):
            return not sys.nonzero or any(aff.point(z))

        for z in fincke_pohst(Hs, bs, sign * c, sign * sys.target, accept):
            v = aff.point(z)
            assert satisfies(L, sys, v)
            return witness(v, "definite")
        return ReprVerdict("NoneExhaustive", strategy="definite",
                           notes=("exhaustive search of the definite solution set",))
    verdict, notes = congruence_scan(L, sys, config)
    if verdict is not None:
        return verdict
    v, visited, complete = bounded_search(L, sys, aff, config.bound, config.search_cap)
    if v is not None:
        assert satisfies(L, sys, v)
        return witness(v, "search", *notes)
    extra = f"searched {visited} points" + (" (full box)" if complete else "")
    return ReprVerdict("Unknown", bound=config.bound, strategy="search",
                       notes=tuple(notes) + (extra,))


# ---------------------------------------------------------------------------
# the B_X predicate


def _probe(L: Lattice, N: Sequence[int], radius: int, cap: int) -> list[int] | None:
    """Small vectors v of L with v² = −2 and v·N = ±1, normalized to v·N = 1."""
    visited = 0
    for r in range(1, radius + 1):
        for v in l1_shell(L.rank, r, r):
            visited += 1
            if visited > cap:
                return None
            if L.norm(v) != -2:
                continue
            d = L.pair(v, N)
            if d == 1:
                return list(v)
            if d == -1:
                return [-x for x in v]
    return None


def minus2_dot1_exists(L: Lattice, N, config: ReprConfig | None = None,
                       probe_radius: int = 3, probe_cap: int = 20_000) -> ReprVerdict:
    """Is there v ∈ L with v² = −2 and v·N = 1?

    Order: parity fast path, a small-vector probe, the half-norm congruence
    scan of the direct system, then the reduction to w ∈ N⊥ with w² = −6 and
    w ≡ N mod 2L (w = 2v + N) handed to :func:`represents`.
    """
    config = config or ReprConfig()
    N = as_coords(N)
    if len(N) != L.rank or any(Fraction(x).denominator != 1 for x in N):
        raise ReprError("N must be an integral vector of the lattice")
    N = [int(x) for x in N]
    if L.norm(N) != -2:
        raise ReprError(f"N has norm {L.norm(N)}, expected -2")
    if math.gcd(*N) != 1:
        raise ReprError("N is not primitive")
    GN = linalg.mat_vec(L.gram, N)
    g = 0
    for x in GN:
        g = math.gcd(g, x)
    if g % 2 == 0:
        return ReprVerdict("ObstructedMod", modulus=2, norm_modulus=2, strategy="parity",
                           notes=("v·N is even for every v in L",))
    v = _probe(L, N, probe_radius, probe_cap)
    if v is not None:
        return witness(v, "probe")
    direct = ConstraintSystem.build(-2, [(N, 1)])
    half = ReprConfig(config.moduli, config.bound, True, config.state_cap, config.search_cap)
    verdict, notes = congruence_scan(L, direct, half)
    if verdict is not None:
        return verdict
    reduced = ConstraintSystem.build(-6, [(N, 0)], coset=(N, 2))
    res = represents(L, reduced, config)
    if res.kind == "Witness":
        w = res.vector
        v = [(wi - ni) // 2 for wi, ni in zip(w, N)]
        assert L.norm(v) == -2 and L.pair(v, N) == 1
        return witness(v, "reduction", f"w = 2v + N = {list(w)}")
    return res.with_notes(*notes)
