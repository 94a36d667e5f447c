"""Discriminant groups and forms, finite-form isomorphism and genus invariants."""

from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from . import linalg
from .lattice import Lattice, LatticeError

DEFAULT_NODE_BUDGET = 10**7
HISTOGRAM_LIMIT = 1 << 20


class DiscriminantError(LatticeError):
    pass


def mod2(x) -> Fraction:
    return Fraction(x) % 2


def mod1(x) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """A finite abelian group ⊕ Z/d_i with q in Q/2Z and b in Q/Z.

    Elements are tuples ``a`` with ``0 <= a_i < d_i``.  ``lifts`` are the
    generator representatives in L∨ (coordinates in the lattice basis) when
    the form comes from a lattice; ``reducer`` sends dual coordinates G·x to
    the element tuple.
    """

    invariant_factors: tuple[int, ...]
    q_gens: tuple[Fraction, ...]
    b_matrix: tuple[tuple[Fraction, ...], ...]
    lifts: tuple[tuple[Fraction, ...], ...] | None = None
    reducer: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def length(self) -> int:
        return len(self.invariant_factors)

    def structure(self) -> str:
        if not self.invariant_factors:
            return "0"
        parts = [f"Z/{d}" for d in self.invariant_factors]
        out: list[str] = []
        for key, grp in itertools.groupby(parts):
            n = len(list(grp))
            out.append(key if n == 1 else f"({key})^{n}")
        return " + ".join(out)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*[range(d) for d in self.invariant_factors])

    def element_order(self, a: Sequence[int]) -> int:
        k = 1
        for ai, d in zip(a, self.invariant_factors):
            k = math.lcm(k, d // math.gcd(ai, d))
        return k

    def normalize(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(ai) % d for ai, d in zip(a, self.invariant_factors))

    def add(self, a, c) -> tuple[int, ...]:
        return self.normalize([x + y for x, y in zip(a, c)])

    def scale(self, n: int, a) -> tuple[int, ...]:
        return self.normalize([n * x for x in a])

    def __post_init__(self):
        # integer mirrors over the common denominator D = exponent², so the
        # hot loops avoid Fraction arithmetic
        n = max(self.invariant_factors, default=1)
        D = n * n
        object.__setattr__(self, "_D", D)
        object.__setattr__(self, "_qi", tuple(int(x * D) % (2 * D) for x in self.q_gens))
        object.__setattr__(self, "_bi", tuple(tuple(int(x * D) % D for x in row)
                                              for row in self.b_matrix))
        for x in self.q_gens:
            if (x * D).denominator != 1:
                raise DiscriminantError("q values are not in (1/exponent²)Z")

    def q_int(self, a: Sequence[int]) -> int:
        qi, bi = self._qi, self._bi
        k = self.length
        total = 0
        for i in range(k):
            ai = a[i]
            if ai:
                total += ai * ai * qi[i]
                row = bi[i]
                for j in range(i + 1, k):
                    if a[j]:
                        total += 2 * ai * a[j] * row[j]
        return total % (2 * self._D)

    def b_int(self, a: Sequence[int], c: Sequence[int]) -> int:
        bi = self._bi
        total = 0
        for i, ai in enumerate(a):
            if ai:
                row = bi[i]
                for j, cj in enumerate(c):
                    if cj:
                        total += ai * cj * row[j]
        return total % self._D

    def q(self, a: Sequence[int]) -> Fraction:
        return Fraction(self.q_int(a), self._D)

    def b(self, a: Sequence[int], c: Sequence[int]) -> Fraction:
        return Fraction(self.b_int(a, c), self._D)

    def is_integral(self) -> bool:
        """True when every q value lies in Z/2Z."""
        return all(x.denominator == 1 for x in self.q_gens) and all(
            (2 * self.b_matrix[i][j]).denominator == 1
            for i in range(self.length) for j in range(i + 1, self.length))

    @cached_property
    def _histogram_int(self) -> Counter:
        return Counter((self.element_order(a), self.q_int(a)) for a in self.elements())

    def histogram(self) -> Counter:
        D = self._D
        return Counter({(k, Fraction(q, D)): n for (k, q), n in self._histogram_int.items()})

    def isotropic_elements(self, order: int | None = None) -> list[tuple[int, ...]]:
        out = []
        for a in self.elements():
            if not any(a):
                continue
            if order is not None and self.element_order(a) != order:
                continue
            if self.q_int(a) == 0:
                out.append(a)
        return out

    def lift(self, a: Sequence[int]) -> list[Fraction]:
        if self.lifts is None:
            raise DiscriminantError("abstract form has no lattice lifts")
        n = len(self.lifts[0]) if self.lifts else 0
        v = [Fraction(0)] * n
        for ai, gen in zip(a, self.lifts):
            if ai:
                for t in range(n):
                    v[t] += ai * gen[t]
        return v

    def reduce_dual(self, y: Sequence[int]) -> tuple[int, ...]:
        """Element of a dual vector given by its integer dual coordinates y = G·x."""
        if self.reducer is None:
            raise DiscriminantError("abstract form has no reducer")
        return self.normalize([sum(r * yi for r, yi in zip(row, y)) for row in self.reducer])

    def gauss_sum(self) -> complex:
        return sum(cmath.exp(1j * math.pi * float(self.q(a))) for a in self.elements())

    def oddity_signature(self) -> float | None:
        """Signature mod 8 read off the Gauss sum, or None if the sum vanishes."""
        g = self.gauss_sum()
        if abs(g) < 1e-9:
            return None
        return (cmath.phase(g) * 8 / (2 * math.pi)) % 8


def _form_from_gram(gram: tuple[tuple[int, ...], ...]) -> FiniteQuadraticForm:
    n = len(gram)
    if n == 0:
        return FiniteQuadraticForm((), (), (), (), ())
    if linalg.determinant(gram) == 0:
        raise DiscriminantError("degenerate lattice has no finite discriminant group")
    sd = linalg.smith_normal_form(gram)
    diag = sd.diagonal
    keep = [i for i, s in enumerate(diag) if s != 1]
    cols = [[sd.V[t][i] for t in range(n)] for i in keep]
    gcols = [linalg.mat_vec(gram, c) for c in cols]
    lifts = [tuple(Fraction(x, diag[i]) for x in c) for i, c in zip(keep, cols)]
    pair = [[Fraction(linalg.dot(c, gc), diag[i] * diag[j]) for j, gc in zip(keep, gcols)]
            for i, c in zip(keep, cols)]
    qg = tuple(mod2(pair[k][k]) for k in range(len(keep)))
    bm = tuple(tuple(mod1(x) for x in row) for row in pair)
    reducer = tuple(tuple(sd.U[i]) for i in keep)
    return FiniteQuadraticForm(tuple(diag[i] for i in keep), qg, bm, tuple(lifts), reducer)


@lru_cache(maxsize=4096)
def _cached_form(gram):
    return _form_from_gram(gram)


def discriminant_group(L: Lattice) -> FiniteQuadraticForm:
    """A_L = L∨/L from the Smith form of the Gram; lifts are V[:, i] / s_i."""
    return _cached_form(L.gram)


def discriminant_form(L: Lattice) -> FiniteQuadraticForm:
    """Same object as :func:`discriminant_group`; q and b are always attached."""
    return _cached_form(L.gram)


def form_from_values(invariant_factors, q_gens, b_matrix) -> FiniteQuadraticForm:
    """Abstract form from generator data (no lattice)."""
    return FiniteQuadraticForm(
        tuple(int(d) for d in invariant_factors),
        tuple(mod2(x) for x in q_gens),
        tuple(tuple(mod1(x) for x in row) for row in b_matrix),
    )


# ---------------------------------------------------------------------------
# isomorphism


@dataclass(frozen=True)
class IsoVerdict:
    kind: str  # "yes" | "no" | "inconclusive"
    witness: tuple[tuple[int, ...], ...] | None = None
    reason: str = ""
    nodes: int = 0

    def __bool__(self):
        return self.kind == "yes"


def verify_isomorphism(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm, images) -> bool:
    """Check a generator map is a well-defined q/b-preserving bijection."""
    if q1.order != q2.order or len(images) != q1.length:
        return False
    for i, (d, h) in enumerate(zip(q1.invariant_factors, images)):
        if any(x for x in q2.scale(d, h)):
            return False
        if q2.q(h) != q1.q_gens[i]:
            return False
        for j in range(q1.length):
            if q2.b(h, images[j]) != q1.b_matrix[i][j]:
                return False
    # b is nondegenerate on q1, so a b-preserving homomorphism is injective;
    # equal orders then give a bijection.  Check nondegeneracy directly.
    return _nondegenerate(q1)


def _nondegenerate(q: FiniteQuadraticForm) -> bool:
    if q.order > HISTOGRAM_LIMIT:
        return True
    gens = [tuple(1 if k == i else 0 for k in range(q.length)) for i in range(q.length)]
    for a in q.elements():
        if any(a) and all(q.b(a, g) == 0 for g in gens):
            return False
    return True


def fqf_isomorphic(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm,
                   budget: int = DEFAULT_NODE_BUDGET) -> IsoVerdict:
    if q1.order != q2.order:
        return IsoVerdict("no", reason=f"group orders differ: {q1.order} vs {q2.order}")
    if q1.invariant_factors != q2.invariant_factors:
        return IsoVerdict("no", reason=f"invariant factors differ: {q1.structure()} vs {q2.structure()}")
    if q1.length == 0:
        return IsoVerdict("yes", witness=(), reason="both groups trivial")
    if q1.order <= HISTOGRAM_LIMIT:
        if q1._histogram_int != q2._histogram_int:
            h1, h2 = q1.histogram(), q2.histogram()
            diff = sorted(set(h1.items()) ^ set(h2.items()))[0]
            return IsoVerdict("no", reason="multisets of (element order, q value) differ, e.g. "
                              f"order {diff[0][0]} with q = {diff[0][1]}")
    else:
        return IsoVerdict("inconclusive", reason=f"group of order {q1.order} too large to search")

    buckets: dict[tuple[int, Fraction], list[tuple[int, ...]]] = {}
    for a in q2.elements():
        buckets.setdefault((q2.element_order(a), q2.q(a)), []).append(a)
    # both forms share the exponent, hence the same integer scale
    target_b = q1._bi
    cands = [buckets.get((d, q1.q_gens[i]), []) for i, d in enumerate(q1.invariant_factors)]
    # most constrained generator first
    order = sorted(range(q1.length), key=lambda i: len(cands[i]))
    images: dict[int, tuple[int, ...]] = {}
    nodes = 0

    def search(depth: int) -> bool | None:
        nonlocal nodes
        if depth == len(order):
            return True
        i = order[depth]
        for h in cands[i]:
            nodes += 1
            if nodes > budget:
                return None
            if all(q2.b_int(h, images[j]) == target_b[i][j] for j in images):
                images[i] = h
                res = search(depth + 1)
                if res is None:
                    return None
                if res:
                    return True
                del images[i]
        return False

    res = search(0)
    if res is None:
        return IsoVerdict("inconclusive", reason=f"node budget {budget} exhausted", nodes=nodes)
    if not res:
        return IsoVerdict("no", reason="no generator assignment preserves q and b", nodes=nodes)
    witness = tuple(images[i] for i in range(q1.length))
    assert verify_isomorphism(q1, q2, witness)
    return IsoVerdict("yes", witness=witness, reason="explicit generator map", nodes=nodes)


# ---------------------------------------------------------------------------
# genus invariants


@dataclass(frozen=True)
class GenusInvariants:
    rank: int
    signature: tuple[int, int, int]
    parity: str
    invariant_factors: tuple[int, ...]
    form: FiniteQuadraticForm = field(repr=False)


def genus_invariants(L: Lattice) -> GenusInvariants:
    form = discriminant_form(L)
    parity = "even" if all(L.gram[i][i] % 2 == 0 for i in range(L.rank)) else "odd"
    return GenusInvariants(L.rank, L.signature(), parity, form.invariant_factors, form)


INDEFINITE_ASSUMPTION = (
    "genus-invariant equality; coincides with isometry for indefinite lattices "
    "meeting the standard uniqueness conditions (assumed, not checked)")


@dataclass(frozen=True)
class GenusVerdict:
    kind: str  # "yes" | "no" | "inconclusive"
    reason: str = ""
    witness: tuple | None = None
    assumption: str = INDEFINITE_ASSUMPTION

    def __bool__(self):
        return self.kind == "yes"


def genus_equal(L1: Lattice, L2: Lattice, budget: int = DEFAULT_NODE_BUDGET) -> GenusVerdict:
    return _genus_equal_cached(L1.gram, L2.gram, budget)


@lru_cache(maxsize=8192)
def _signature(gram):
    return linalg.congruence_diagonalize(gram)[2]


@lru_cache(maxsize=8192)
def _genus_equal_cached(g1, g2, budget) -> GenusVerdict:
    if len(g1) != len(g2):
        return GenusVerdict("no", f"ranks differ: {len(g1)} vs {len(g2)}")
    s1 = _signature(g1)
    s2 = _signature(g2)
    if s1 != s2:
        return GenusVerdict("no", f"signatures differ: {s1} vs {s2}")
    if s1[2]:
        return GenusVerdict("inconclusive", "degenerate lattice")
    v = fqf_isomorphic(_cached_form(g1), _cached_form(g2), budget)
    if v.kind == "yes":
        return GenusVerdict("yes", "rank, signature and discriminant forms agree", v.witness)
    if v.kind == "no":
        return GenusVerdict("no", v.reason)
    return GenusVerdict("inconclusive", v.reason)


def milgram_defect(L: Lattice) -> float:
    """|Σ exp(πi q(x)) − √|A| exp(2πi σ/8)| for the discriminant form of L."""
    form = discriminant_form(L)
    pos, neg, _ = L.signature()
    expected = math.sqrt(form.order) * cmath.exp(2j * math.pi * (pos - neg) / 8)
    return abs(form.gauss_sum() - expected)
