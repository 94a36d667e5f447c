"""Even overlattices by glue vectors, orthogonal complements and saturation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .discriminant import DiscriminantError, discriminant_form, genus_equal
from .lattice import Lattice, LatticeError, as_coords


@dataclass(frozen=True)
class OverlatticeResult:
    lattice: Lattice
    glue: tuple[Fraction, ...]
    index: int
    basis: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    glues: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False)
    integral_q: bool = False
    flags: tuple[str, ...] = ()


def _integer_rows(rows: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    den = 1
    for row in rows:
        den = den * linalg.common_denominator(row) // _gcd(den, linalg.common_denominator(row))
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def span_basis(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Z-basis (HNF rows) of the module spanned by rational vectors."""
    ints, den = _integer_rows(rows)
    return [[Fraction(x, den) for x in row] for row in linalg.hnf_basis(ints)]


def sublattice(ambient: Lattice, basis: Sequence[Sequence], label: str = "",
               names: Sequence[str] | None = None) -> Lattice:
    """Lattice with Gram B·G·Bᵀ for basis rows B (rational allowed if the result is integral)."""
    ints, den = _integer_rows(basis)
    G = ambient.gram
    GB = [linalg.mat_vec(G, v) for v in ints]
    d2 = den * den
    gram = []
    for u in ints:
        row = []
        for gv in GB:
            x = linalg.dot(u, gv)
            if x % d2:
                raise LatticeError("basis does not span an integral lattice")
            row.append(x // d2)
        gram.append(row)
    return Lattice(gram, tuple(names) if names else (), label)


def overlattice_from_glue(L: Lattice, glue: Sequence[Sequence], label: str = "") -> tuple[Lattice, list[list[Fraction]], int]:
    """Lattice spanned by L and the glue vectors.  Returns (lattice, basis, index)."""
    n = L.rank
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows += [[Fraction(x) for x in g] for g in glue]
    basis = span_basis(rows)
    if len(basis) != n:
        raise LatticeError("glue vectors leave the rational span")
    # index = 1 / |det basis|
    det = linalg.determinant_rational(basis)
    index = Fraction(1) / abs(det)
    if index.denominator != 1:
        raise LatticeError("computed index is not an integer")
    return sublattice(L, basis, label), basis, int(index)


def even_overlattices(L: Lattice, r: int = 2, glue_filter=None) -> list[OverlatticeResult]:
    """One result per genus class of even index-r overlattices (r prime).

    ``glue_filter`` (a predicate on the rational glue lift) restricts which
    isotropic elements are used.
    """
    if r < 2 or any(r % p == 0 for p in range(2, int(r ** 0.5) + 1)):
        raise LatticeError(f"index {r} is not prime")
    form = discriminant_form(L)
    seen_subgroups: set[tuple[int, ...]] = set()
    classes: list[dict] = []
    for a in form.isotropic_elements(order=r):
        key = min(form.scale(k, a) for k in range(1, r))
        if key in seen_subgroups:
            continue
        seen_subgroups.add(key)
        glue = tuple(form.lift(a))
        if glue_filter is not None and not glue_filter(glue):
            continue
        lat, basis, index = overlattice_from_glue(L, [glue])
        assert index == r
        assert all(lat.gram[i][i] % 2 == 0 for i in range(lat.rank))
        placed = False
        for cls in classes:
            v = genus_equal(cls["lattice"], lat)
            if v.kind == "yes":
                cls["glues"].append(glue)
                placed = True
                break
            if v.kind == "inconclusive":
                cls["flags"].add("genus comparison inconclusive; kept separately")
        if not placed:
            classes.append({"lattice": lat, "basis": basis, "glues": [glue], "flags": set()})
    out = []
    for cls in classes:
        lat = cls["lattice"]
        try:
            integral = discriminant_form(lat).is_integral()
        except DiscriminantError:
            integral = False
        out.append(OverlatticeResult(
            lattice=lat,
            glue=cls["glues"][0],
            index=r,
            basis=tuple(tuple(row) for row in cls["basis"]),
            glues=tuple(cls["glues"]),
            integral_q=integral,
            flags=tuple(sorted(cls["flags"])),
        ))
    return out


@dataclass(frozen=True)
class ComplementResult:
    lattice: Lattice
    basis: tuple[tuple[int, ...], ...]
    degenerate: bool = False


def orthogonal_complement(ambient: Lattice, vectors: Sequence, label: str = "") -> ComplementResult:
    """Saturated complement of the span of ``vectors`` (rational allowed) in ``ambient``."""
    n = ambient.rank
    vecs = [as_coords(v) for v in vectors]
    for v in vecs:
        if len(v) != n:
            raise LatticeError("vector length does not match lattice rank")
    if not vecs:
        basis = linalg.identity(n)
    else:
        G = ambient.gram
        pair_rows = [[sum(Fraction(v[i]) * G[i][j] for i in range(n)) for j in range(n)] for v in vecs]
        ints, _ = _integer_rows(pair_rows)
        basis = linalg.integer_kernel(ints, ncols=n)
    lat = sublattice(ambient, basis, label)
    degenerate = bool(lat.rank) and lat.det() == 0
    return ComplementResult(lat, tuple(tuple(row) for row in basis), degenerate)


@dataclass(frozen=True)
class SaturationResult:
    basis: tuple[tuple[int, ...], ...]
    index: int
    lattice: Lattice | None = None


def saturation_and_index(ambient: Lattice, sub: Sequence) -> SaturationResult:
    """Primitive closure of span(sub) in ``ambient`` and the index [saturation : span]."""
    rows = [as_coords(v) for v in sub]
    for v in rows:
        if any(Fraction(x).denominator != 1 for x in v):
            raise LatticeError("sublattice vectors must be integral in the ambient basis")
    rows = [[int(x) for x in v] for v in rows]
    if linalg.rank(rows) != len(rows):
        raise LatticeError("sublattice vectors are linearly dependent")
    n = ambient.rank
    perp = linalg.integer_kernel(rows, ncols=n)
    sat = linalg.integer_kernel(perp, ncols=n) if perp else linalg.identity(n)
    # coordinates of the input vectors in the saturated basis
    coeffs = []
    satT = linalg.transpose(sat)
    for v in rows:
        c = linalg.solve_rational(satT, v)
        assert c is not None and all(x.denominator == 1 for x in c)
        coeffs.append([int(x) for x in c])
    index = abs(linalg.determinant(coeffs))
    try:
        lat = sublattice(ambient, sat)
    except LatticeError:
        lat = None
    return SaturationResult(tuple(tuple(r) for r in sat), index, lat)
