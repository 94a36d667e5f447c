"""Even integer lattices, the lattice spec grammar, and Néron–Severi builders.

Root lattices are negative definite (the K3 Néron–Severi convention).
Node orderings of the Dynkin blocks::

    A_n  1 - 2 - ... - n
    D_n  1 - 2 - ... - (n-2) - (n-1)
                        |
                        n
    E_n  1 - 3 - 4 - 5 - ... - n      (Bourbaki labels)
                 |
                 2

The I_n* components Θ_1 .. Θ_{n+4} follow the D_{n+4} ordering above, with
Θ_0 (the identity component) and Θ_1 both meeting Θ_2, and Θ_{n+3}, Θ_{n+4}
meeting Θ_{n+2}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .linalg import Matrix


class LatticeError(ValueError):
    pass


class SpecParseError(LatticeError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]
    basis_names: tuple[str, ...] = ()
    label: str = ""

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        if not linalg.is_symmetric(g):
            raise LatticeError("Gram matrix is not symmetric")
        if any(g[i][i] % 2 for i in range(len(g))):
            raise LatticeError(f"lattice {self.label or g!r} is not even")
        if not self.basis_names:
            object.__setattr__(self, "basis_names", tuple(f"e{i + 1}" for i in range(len(g))))
        elif len(self.basis_names) != len(g):
            raise LatticeError("basis_names length does not match rank")
        else:
            object.__setattr__(self, "basis_names", tuple(self.basis_names))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def G(self) -> Matrix:
        return [list(row) for row in self.gram]

    def det(self) -> int:
        return linalg.determinant(self.gram)

    def pair(self, u: Sequence, v: Sequence):
        return linalg.bilinear(self.gram, u, v)

    def norm(self, v: Sequence):
        return linalg.bilinear(self.gram, v, v)

    def index_of(self, name: str) -> int:
        return self.basis_names.index(name)

    def vector(self, terms: dict[str, int | Fraction] | None = None, **kw) -> list:
        """Coordinates of Σ c·name.  ``lat.vector({"F": 1, "s0": -1})``."""
        v = [0] * self.rank
        for name, c in {**(terms or {}), **kw}.items():
            v[self.index_of(name)] += c
        return v

    def signature(self) -> tuple[int, int, int]:
        return linalg.congruence_diagonalize(self.gram)[2]

    def __str__(self):
        return self.label or f"Lattice(rank={self.rank})"


@dataclass(frozen=True)
class LatticeVector:
    """Coordinates in a lattice basis; ``rational`` marks dual or glue vectors."""

    coords: tuple
    rational: bool = False

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        integral = all(c.denominator == 1 for c in coords)
        if integral:
            coords = tuple(int(c) for c in coords)
        elif not self.rational:
            raise LatticeError("non-integral coordinates must be flagged rational")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, coords: Sequence) -> "LatticeVector":
        fr = [Fraction(c) for c in coords]
        return cls(tuple(fr), rational=any(c.denominator != 1 for c in fr))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def denominator(self) -> int:
        return linalg.common_denominator(self.coords)


def as_coords(v) -> list:
    return list(v.coords) if isinstance(v, LatticeVector) else list(v)


def direct_sum(*lattices: Lattice, label: str | None = None) -> Lattice:
    gram = linalg.block_diagonal([lat.G for lat in lattices])
    names: list[str] = []
    for lat in lattices:
        names.extend(lat.basis_names)
    if len(set(names)) != len(names):
        names = [f"e{i + 1}" for i in range(len(names))]
    if label is None:
        label = "+".join(lat.label for lat in lattices if lat.label)
    return Lattice(gram, tuple(names), label)


def twist(lat: Lattice, m: int, label: str | None = None) -> Lattice:
    if m == 0:
        raise LatticeError("twist by 0 is degenerate")
    return Lattice([[m * x for x in row] for row in lat.gram], lat.basis_names,
                   label if label is not None else f"{lat.label}({m})")


# ---------------------------------------------------------------------------
# root lattices


def _from_edges(n: int, edges) -> Matrix:
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = -2
    for a, b in edges:
        G[a][b] = G[b][a] = 1
    return G


def dynkin_edges(kind: str, n: int) -> list[tuple[int, int]]:
    """Zero-based edge list of the chosen node ordering."""
    if kind == "A":
        if n < 1:
            raise LatticeError("A_n needs n >= 1")
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        if n < 4:
            raise LatticeError("D_n needs n >= 4")
        return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    if kind == "E":
        if n not in (6, 7, 8):
            raise LatticeError("E_n needs n in {6, 7, 8}")
        return [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, n - 1)]
    raise LatticeError(f"unknown root system {kind!r}")


def root_lattice(kind: str, n: int) -> Lattice:
    G = _from_edges(n, dynkin_edges(kind, n))
    return Lattice(G, tuple(f"{kind}{n}_{i + 1}" for i in range(n)), f"{kind}{n}")


def hyperbolic_plane(m: int = 1) -> Lattice:
    label = "U" if m == 1 else f"U({m})"
    return Lattice([[0, m], [m, 0]], ("u1", "u2"), label)


def rank_one(k: int) -> Lattice:
    if k % 2:
        raise LatticeError(f"<{k}> is odd; only even lattices are supported")
    if k == 0:
        raise LatticeError("<0> is degenerate")
    return Lattice([[k]], ("n",), f"<{k}>")


# ---------------------------------------------------------------------------
# spec grammar
#
#   term   := "U" | "U(" int ")" | "A"n | "D"n | "E"n | "<" even-int ">"
#   factor := term [ "(" int ")" ] [ "^" count ]
#   spec   := factor { "+" factor }


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.chars = [(i, c) for i, c in enumerate(text) if not c.isspace()]
        self.k = 0

    def pos(self) -> int:
        return self.chars[self.k][0] if self.k < len(self.chars) else len(self.text)

    def peek(self) -> str:
        return self.chars[self.k][1] if self.k < len(self.chars) else ""

    def take(self, expected: str | None = None) -> str:
        c = self.peek()
        if not c or (expected is not None and c != expected):
            want = repr(expected) if expected else "more input"
            raise SpecParseError(f"expected {want}, found {c or 'end of input'!r}",
                                 self.text, self.pos())
        self.k += 1
        return c

    def integer(self, signed: bool = False) -> int:
        start = self.pos()
        digits = ""
        if signed and self.peek() in "+-":
            digits += self.take()
        while self.peek().isdigit():
            digits += self.take()
        if not digits.lstrip("+-"):
            raise SpecParseError("expected an integer", self.text, start)
        return int(digits)

    def term(self) -> tuple[Lattice, int]:
        start = self.pos()
        c = self.peek()
        if c == "U":
            self.take()
            if self.peek() == "(":
                self.take("(")
                m = self.integer(signed=True)
                self.take(")")
                if m == 0:
                    raise SpecParseError("U(0) is degenerate", self.text, start)
                return hyperbolic_plane(m), start
            return hyperbolic_plane(), start
        if c in ("A", "D", "E"):
            self.take()
            n = self.integer()
            try:
                return root_lattice(c, n), start
            except LatticeError as exc:
                raise SpecParseError(str(exc), self.text, start) from None
        if c == "<":
            self.take()
            k = self.integer(signed=True)
            self.take(">")
            try:
                return rank_one(k), start
            except LatticeError as exc:
                raise SpecParseError(str(exc), self.text, start) from None
        raise SpecParseError(f"unexpected {c or 'end of input'!r}", self.text, start)

    def factor(self) -> list[Lattice]:
        lat, start = self.term()
        if self.peek() == "(":
            self.take()
            m = self.integer(signed=True)
            self.take(")")
            if m == 0:
                raise SpecParseError("twist by 0 is degenerate", self.text, start)
            lat = twist(lat, m)
        count = 1
        if self.peek() == "^":
            self.take()
            count = self.integer()
            if count < 1:
                raise SpecParseError("exponent must be positive", self.text, start)
        return [lat] * count

    def spec(self) -> list[Lattice]:
        parts = self.factor()
        while self.peek() == "+":
            self.take()
            parts.extend(self.factor())
        if self.peek():
            raise SpecParseError(f"unexpected {self.peek()!r}", self.text, self.pos())
        return parts


def _canonical_label(parts: list[Lattice]) -> str:
    out: list[str] = []
    i = 0
    while i < len(parts):
        j = i
        while j < len(parts) and parts[j].label == parts[i].label:
            j += 1
        out.append(parts[i].label + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "+".join(out)


def parse_spec(text: str) -> Lattice:
    """Build the direct sum described by a spec such as ``"U+E8^2+A1^2"``."""
    parts = _Parser(text).spec()
    gram = linalg.block_diagonal([p.G for p in parts])
    names: list[str] = []
    counts: dict[str, int] = {}
    for p in parts:
        counts[p.label] = counts.get(p.label, 0) + 1
        tag = p.label if counts[p.label] == 1 else f"{p.label}#{counts[p.label]}"
        if p.rank == 1:
            names.append(tag)
        else:
            names.extend(f"{tag}.{i + 1}" for i in range(p.rank))
    if len(parts) == 1 and parts[0].rank > 1:
        names = list(parts[0].basis_names)
    return Lattice(gram, tuple(names), _canonical_label(parts))


@dataclass(frozen=True)
class LatticeInvariants:
    rank: int
    signature: tuple[int, int, int]
    determinant: int
    even: bool
    hyperbolic: bool


def invariants(lat: Lattice) -> LatticeInvariants:
    sig = lat.signature()
    even = all(lat.gram[i][i] % 2 == 0 for i in range(lat.rank))
    return LatticeInvariants(
        rank=lat.rank,
        signature=sig,
        determinant=lat.det(),
        even=even,
        hyperbolic=sig == (1, lat.rank - 1, 0),
    )


# ---------------------------------------------------------------------------
# elliptic fibrations with trivial Mordell–Weil group


@dataclass(frozen=True)
class FiberType:
    """Kodaira type: ``I_n`` (n >= 2), ``I_n*`` (n >= 0), ``II*``, ``III*``, ``IV*``."""

    family: str  # "I", "I*", "II*", "III*", "IV*"
    n: int = 0

    @classmethod
    def parse(cls, text: str) -> "FiberType":
        t = text.strip().replace("_", "").replace(" ", "")
        if t in ("II*", "III*", "IV*"):
            return cls(t)
        m = re.fullmatch(r"I(\d+)(\*?)", t)
        if not m:
            raise LatticeError(f"unsupported fiber type {text!r}")
        n = int(m.group(1))
        return cls("I*" if m.group(2) else "I", n)

    def __str__(self):
        if self.family == "I":
            return f"I{self.n}"
        if self.family == "I*":
            return f"I{self.n}*"
        return self.family

    @property
    def trivial(self) -> bool:
        return self.family == "I" and self.n <= 1

    def components(self) -> tuple[str, int]:
        """Root system (kind, rank) spanned by the non-identity components."""
        if self.family == "I":
            return ("A", self.n - 1)
        if self.family == "I*":
            return ("D", self.n + 4)
        return {"II*": ("E", 8), "III*": ("E", 7), "IV*": ("E", 6)}[self.family]

    def multiplicities(self) -> list[int]:
        """Coefficients m_i with F = Θ_0 + Σ m_i Θ_i (node order as above)."""
        kind, r = self.components()
        if kind == "A":
            return [1] * r
        if kind == "D":
            return [1] + [2] * (r - 3) + [1, 1]
        return {8: [2, 3, 4, 6, 5, 4, 3, 2],
                7: [2, 2, 3, 4, 3, 2, 1],
                6: [1, 2, 2, 3, 2, 1]}[r]

    def group_order(self) -> int:
        if self.family == "I":
            return self.n
        if self.family == "I*":
            return 4
        return {"II*": 1, "III*": 2, "IV*": 3}[self.family]


@dataclass(frozen=True)
class EllipticNS:
    lattice: Lattice
    fibers: tuple[FiberType, ...]
    notes: tuple[str, ...] = field(default=())

    def theta(self, j: int, i: int) -> list[int]:
        """Class of Θ_i^{(j)} (fibers numbered from 1); i = 0 gives F − Σ m_k Θ_k."""
        lat = self.lattice
        fiber = self.fibers[j - 1]
        if i:
            return lat.vector({f"T{j}_{i}": 1})
        v = lat.vector({"F": 1})
        for k, m in enumerate(fiber.multiplicities(), start=1):
            v[lat.index_of(f"T{j}_{k}")] -= m
        return v


def build_elliptic_ns(fibers: Sequence[FiberType | str], trivial_mw: bool = True) -> EllipticNS:
    """NS lattice spanned by F, s0 and the non-identity fiber components.

    Basis order: ``F, s0`` then ``T{j}_{i}`` = Θ_i^{(j)} for the j-th reducible
    fiber.  Fibers of type I_0/I_1 contribute nothing and are skipped.
    """
    if not trivial_mw:
        raise LatticeError("nontrivial Mordell–Weil groups are not modeled")
    kept: list[FiberType] = []
    notes: list[str] = []
    for f in fibers:
        ft = FiberType.parse(f) if isinstance(f, str) else f
        if ft.trivial:
            notes.append(f"fiber {ft} has no non-identity components; ignored")
            continue
        kept.append(ft)
    blocks = [[[0, 1], [1, -2]]]
    names = ["F", "s0"]
    for j, ft in enumerate(kept, start=1):
        kind, r = ft.components()
        blocks.append(_from_edges(r, dynkin_edges(kind, r)))
        names.extend(f"T{j}_{i}" for i in range(1, r + 1))
    gram = linalg.block_diagonal(blocks)
    label = "NS(" + "+".join(str(f) for f in kept) + ")"
    return EllipticNS(Lattice(gram, tuple(names), label), tuple(kept), tuple(notes))
