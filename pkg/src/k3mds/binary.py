"""Binary quadratic forms Q(x, y) = a x² + 2b xy + c y² and the negative Pell equation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .represent import ReprError, ReprVerdict, witness


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def evaluate(a: int, b: int, c: int, x: int, y: int) -> int:
    return a * x * x + 2 * b * x * y + c * y * y


def isotropic_vector(a: int, b: int, c: int) -> ReprVerdict:
    """Nonzero (x, y) with Q = 0; exists iff b² − ac is a perfect square."""
    D = b * b - a * c
    if D == 0:
        raise ReprError("degenerate binary form")
    if not is_square(D):
        return ReprVerdict("NoneExhaustive", strategy="discriminant",
                           notes=(f"b² − ac = {D} is not a square",))
    s = math.isqrt(D)
    if a == 0:
        x, y = 1, 0
    else:
        # a x + (b ∓ s) y = 0 is a factor of a·Q
        x, y = -b + s, a
        g = math.gcd(x, y)
        x, y = x // g, y // g
        if y < 0:
            x, y = -x, -y
    assert evaluate(a, b, c, x, y) == 0 and (x, y) != (0, 0)
    return witness((x, y), "discriminant")


def sqrt_continued_fraction(d: int) -> tuple[int, list[int]]:
    """(a0, period) of the continued fraction of √d for nonsquare d > 0."""
    if d <= 0 or is_square(d):
        raise ReprError(f"√{d} is rational")
    a0 = math.isqrt(d)
    m, q, a = 0, 1, a0
    period = []
    while True:
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        period.append(a)
        if a == 2 * a0:
            return a0, period


@dataclass(frozen=True)
class PellResult:
    d: int
    period: tuple[int, ...]
    solution: tuple[int, int] | None

    @property
    def solvable(self) -> bool:
        return self.solution is not None


def negative_pell(d: int) -> PellResult:
    """Fundamental solution of x² − d y² = −1 (solvable iff the period of √d is odd)."""
    if d <= 0:
        raise ReprError("d must be positive")
    if is_square(d):
        sol = (0, 1) if d == 1 else None
        return PellResult(d, (), sol)
    a0, period = sqrt_continued_fraction(d)
    k = len(period)
    if k % 2 == 0:
        return PellResult(d, tuple(period), None)
    # convergent p_{k-1}/q_{k-1}
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    for a in period[:k - 1]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    assert p * p - d * q * q == -1
    return PellResult(d, tuple(period), (p, q))


# ---------------------------------------------------------------------------
# indefinite forms: cycles of reduced forms
#
# Forms here are Gauss triples (A, B, C) for A x² + B xy + C y².


def _mat_mul(X, Y):
    return ((X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
            (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]))


def _apply(f, M):
    """f ∘ M, i.e. f(M·(x, y))."""
    A, B, C = f
    (p, q), (r, s) = M
    return (A * p * p + B * p * r + C * r * r,
            2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s,
            A * q * q + B * q * s + C * s * s)


def _is_reduced(f, r: int) -> bool:
    A, B, _ = f
    return 0 < B <= r and r - B < 2 * abs(A) <= r + B


def _rho(f, r: int):
    """One reduction step f ∘ [[0, −1], [1, t]] and its matrix."""
    A, B, C = f
    c2 = 2 * abs(C)
    if abs(C) <= r:
        # largest B' ≡ −B (mod 2|C|) with B' <= r
        Bn = r - ((r + B) % c2)
    else:
        Bn = -B % c2
        if Bn > abs(C):
            Bn -= c2
    t = (Bn + B) // (2 * C)
    M = ((0, -1), (1, t))
    g = _apply(f, M)
    assert g[1] == Bn
    return g, M


def reduce_form(f):
    """(reduced form, M) with f ∘ M = reduced (discriminant positive nonsquare)."""
    D = f[1] ** 2 - 4 * f[0] * f[2]
    r = math.isqrt(D)
    M = ((1, 0), (0, 1))
    g = f
    for _ in range(10_000):
        if _is_reduced(g, r):
            return g, M
        g, step = _rho(g, r)
        M = _mat_mul(M, step)
    raise ReprError("reduction did not terminate")


def cycle(f):
    """The ρ-cycle of a reduced form as a list of (form, matrix from f)."""
    D = f[1] ** 2 - 4 * f[0] * f[2]
    r = math.isqrt(D)
    out = [(f, ((1, 0), (0, 1)))]
    g, M = f, ((1, 0), (0, 1))
    while True:
        g, step = _rho(g, r)
        M = _mat_mul(M, step)
        if g == f:
            return out
        out.append((g, M))


def _inverse(M):
    (p, q), (r, s) = M
    det = p * s - q * r
    assert det in (1, -1)
    return ((s * det, -q * det), (-r * det, p * det))


def represents_value(a: int, b: int, c: int, n: int) -> ReprVerdict:
    """Does a x² + 2b xy + c y² represent the squarefree value n (indefinite, anisotropic)?"""
    A, B, C = a, 2 * b, c
    D = B * B - 4 * A * C
    if D <= 0 or is_square(D):
        raise ReprError("cycle method needs a positive nonsquare discriminant")
    if n == 0:
        raise ReprError("use isotropic_vector for n = 0")
    f_red, Tf = reduce_form((A, B, C))
    cyc = {g: M for g, M in cycle(f_red)}
    # only primitive representations matter when n is squarefree
    m = abs(n)
    if any(n % (p * p) == 0 for p in range(2, math.isqrt(m) + 1)):
        raise ReprError("represents_value expects a squarefree target")
    for B0 in range(2 * m):
        if (B0 * B0 - D) % (4 * m):
            continue
        g = (n, B0, (B0 * B0 - D) // (4 * n))
        g_red, Tg = reduce_form(g)
        if g_red in cyc:
            # f ∘ Tf ∘ C = g ∘ Tg  ⇒  f ∘ (Tf C Tg⁻¹) = g
            T = _mat_mul(_mat_mul(Tf, cyc[g_red]), _inverse(Tg))
            x, y = T[0][0], T[1][0]
            assert evaluate(a, b, c, x, y) == n
            return witness((x, y), "reduced-cycle")
    return ReprVerdict("NoneExhaustive", strategy="reduced-cycle",
                       notes=(f"{n} is not a leading coefficient of any form in the class",))


def binary_form_tools(a: int, b: int, c: int, query: str, d: int | None = None) -> ReprVerdict:
    """Queries ``isotropic`` and ``represents_minus2_for_2_minus2d``."""
    if b * b - a * c == 0:
        raise ReprError("degenerate binary form")
    if query == "isotropic":
        return isotropic_vector(a, b, c)
    if query == "represents_minus2_for_2_minus2d":
        if d is None:
            if a != 2 or b != 0 or c >= 0 or c % 2:
                raise ReprError("form is not of the shape <2> + <-2d>")
            d = -c // 2
        if (a, b, c) != (2, 0, -2 * d):
            raise ReprError(f"form ({a}, {b}, {c}) does not match <2> + <-{2 * d}>")
        res = negative_pell(d)
        if res.solvable:
            x, y = res.solution
            return witness((x, y), "negative-pell", f"period length {len(res.period)}")
        why = "d is a square greater than 1" if not res.period else f"even period {len(res.period)}"
        return ReprVerdict("NoneExhaustive", strategy="negative-pell", notes=(why,))
    raise ReprError(f"unknown query {query!r}")


def represents_minus2(a: int, b: int, c: int) -> ReprVerdict:
    """General −2 test for an even indefinite binary lattice [[a, b], [b, c]]."""
    if b == 0 and a == 2 and c < 0 and c % 2 == 0:
        return binary_form_tools(a, b, c, "represents_minus2_for_2_minus2d")
    D = b * b - a * c
    if D <= 0:
        raise ReprError("form is not indefinite")
    if is_square(D):
        raise ReprError("isotropic form: decide with isotropic_vector first")
    return represents_value(a, b, c, -2)
