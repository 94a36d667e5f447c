"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  Entries are Python ints (or
``fractions.Fraction`` where noted), so nothing ever overflows or rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# basic helpers


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def copy_matrix(A: Sequence[Sequence]) -> list[list]:
    return [list(row) for row in A]


def transpose(A: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def bilinear(G: Sequence[Sequence], u: Sequence, v: Sequence):
    """uᵀ·G·v."""
    return dot(u, mat_vec(G, v))


def is_symmetric(G: Sequence[Sequence]) -> bool:
    n = len(G)
    return all(len(row) == n for row in G) and all(
        G[i][j] == G[j][i] for i in range(n) for j in range(i + 1, n)
    )


def block_diagonal(blocks: Sequence[Sequence[Sequence[int]]]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = copy_matrix(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: Sequence[Sequence]) -> int:
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return 0
    r = 0
    ncols = len(M[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def inverse_rational(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Inverse over Q; raises ``ValueError`` for singular input."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [row[n:] for row in M]


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some rational x with A·x = b, or None if the system is inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [x / p for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * bb for a, bb in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return x


def common_denominator(values) -> int:
    d = 1
    for v in values:
        den = Fraction(v).denominator
        d = d * den // gcd(d, den)
    return d


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class SmithDecomposition:
    U: Matrix
    S: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        k = min(len(self.S), len(self.S[0]) if self.S else 0)
        return [self.S[i][i] for i in range(k)]


@dataclass(frozen=True)
class HermiteForm:
    H: Matrix
    T: Matrix

    @property
    def pivots(self) -> list[tuple[int, int]]:
        """(column, value) of each nonzero row's leading entry."""
        out = []
        for row in self.H:
            for c, x in enumerate(row):
                if x:
                    out.append((c, x))
                    break
        return out


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """U·A·V = S with S diagonal, nonnegative, s_1 | s_2 | ... ."""
    m = len(A)
    n = len(A[0]) if m else 0
    S = copy_matrix(A)
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        if f:
            S[dst] = [a + f * b for a, b in zip(S[dst], S[src])]
            U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        if f:
            for row in S:
                row[dst] += f * row[src]
            for row in V:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, m):
                add_row(i, t, -(S[i][t] // S[t][t]))
            for j in range(t + 1, n):
                add_col(j, t, -(S[t][j] // S[t][t]))
            rest = [(abs(S[i][t]), i, None) for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), None, j) for j in range(t + 1, n) if S[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda r: r[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return SmithDecomposition(U, S, V)


def hermite_normal_form(A: Sequence[Sequence[int]]) -> HermiteForm:
    """Row-style upper echelon form T·A = H.

    Pivots are positive and the entries above each pivot lie in
    ``[0, pivot)``.  Zero rows are kept at the bottom so ``T`` stays square.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = copy_matrix(A)
    T = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            T[r], T[p] = T[p], T[r]
            clean = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    T[i] = [a - q * b for a, b in zip(T[i], T[r])]
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if not H[r][c]:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            T[r] = [-x for x in T[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                T[i] = [a - q * b for a, b in zip(T[i], T[r])]
        r += 1
    return HermiteForm(H, T)


def determinant_rational(A: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(A)
    den = common_denominator(x for row in A for x in row)
    scaled = [[int(Fraction(x) * den) for x in row] for row in A]
    return Fraction(determinant(scaled), den ** n)


def hnf_basis(rows: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the Hermite form: a canonical basis of the row span."""
    return [row for row in hermite_normal_form(rows).H if any(row)]


def integer_kernel(A: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Saturated basis of {v ∈ Zⁿ : A·v = 0}, returned as rows.

    ``ncols`` is only needed when ``A`` has no rows.
    """
    n = len(A[0]) if A else ncols
    if n is None:
        raise ValueError("cannot infer column count of an empty matrix")
    if not A:
        return identity(n)
    hf = hermite_normal_form(transpose(A))
    basis = [hf.T[i] for i in range(n) if not any(hf.H[i])]
    return hnf_basis(basis) if basis else []


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """Some integer x with A·x = b, or None when no integer solution exists."""
    m = len(A)
    if m == 0:
        return None
    n = len(A[0])
    snf = smith_normal_form(A)
    c = mat_vec(snf.U, b)
    d = snf.diagonal
    y = [0] * n
    for i in range(m):
        s = d[i] if i < len(d) else 0
        if s == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % s:
                return None
            y[i] = c[i] // s
    return mat_vec(snf.V, y)


# ---------------------------------------------------------------------------
# symmetric forms


def congruence_diagonalize(G: Sequence[Sequence[int]]):
    """Return (D, P, (pos, neg, zero)) with D = Pᵀ·G·P diagonal over Q."""
    if not is_symmetric(G):
        raise ValueError("matrix is not symmetric")
    n = len(G)
    D = [[Fraction(x) for x in row] for row in G]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def swap(i, j):
        D[i], D[j] = D[j], D[i]
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in P:
            row[i], row[j] = row[j], row[i]

    def add(dst, src, f):
        # column op then the matching row op keeps D symmetric
        for row in D:
            row[dst] += f * row[src]
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        for row in P:
            row[dst] += f * row[src]

    for k in range(n):
        if D[k][k] == 0:
            j = next((j for j in range(k + 1, n) if D[j][j] != 0), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if D[k][j] != 0), None)
                if j is None:
                    continue
                add(k, j, Fraction(1))
        for j in range(k + 1, n):
            if D[j][k] != 0:
                add(j, k, -D[j][k] / D[k][k])
    diag = [D[i][i] for i in range(n)]
    sig = (sum(1 for x in diag if x > 0), sum(1 for x in diag if x < 0),
           sum(1 for x in diag if x == 0))
    return D, P, sig
