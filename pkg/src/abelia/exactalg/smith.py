"""Smith normal form over Euclidean domains, with unimodular transforms.

Two rings are wired in: the integers and Q(i)[hbar].  The elimination loop is
shared; a ring only has to supply a Euclidean size, division with remainder and
a unit normalisation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .poly import HbarPoly
from .scalars import ONE


class EuclideanRing:
    zero: Any
    one: Any

    def size(self, x) -> int:
        raise NotImplementedError

    def divmod(self, a, b):
        raise NotImplementedError

    def unit_normaliser(self, x):
        """Return a unit u with u * x in canonical form."""
        raise NotImplementedError

    def unit_inverse(self, u):
        raise NotImplementedError


class IntegerRing(EuclideanRing):
    zero = 0
    one = 1

    def size(self, x):
        return abs(x)

    def divmod(self, a, b):
        return divmod(a, b)

    def unit_normaliser(self, x):
        return -1 if x < 0 else 1

    def unit_inverse(self, u):
        return u


class HbarPolyRing(EuclideanRing):
    zero = HbarPoly()
    one = HbarPoly([ONE])

    def size(self, x):
        return x.degree

    def divmod(self, a, b):
        return divmod(a, b)

    def unit_normaliser(self, x):
        return HbarPoly([x.lc().inverse()])

    def unit_inverse(self, u):
        return HbarPoly([u.coeffs[0].inverse()])


INTEGERS = IntegerRing()
HBAR_POLYS = HbarPolyRing()


@dataclass(frozen=True)
class SmithDecomposition:
    """``U * D * W == M`` with U, W invertible and D in Smith form.

    ``U_inv`` and ``W_inv`` are kept as well: the columns of ``W_inv`` past the
    rank span the kernel of M.
    """

    U: list
    D: list
    W: list
    U_inv: list
    W_inv: list
    rank: int

    @property
    def diagonal(self) -> list:
        return [self.D[i][i] for i in range(self.rank)]


def _identity(n, ring):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def _bezout(ring, a, b):
    """(g, x, y, a/g, b/g) with x a + y b = g a gcd of a and b; a is nonzero."""
    q, r = ring.divmod(b, a)
    if not r:
        return a, ring.one, ring.zero, ring.one, q
    r0, r1, x0, x1, y0, y1 = a, b, ring.one, ring.zero, ring.zero, ring.one
    while r1:
        q, r = ring.divmod(r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return r0, x0, y0, ring.divmod(a, r0)[0], ring.divmod(b, r0)[0]


def smith_normal_form(M: Sequence[Sequence], ring: EuclideanRing = HBAR_POLYS,
                      shape: tuple[int, int] | None = None) -> SmithDecomposition:
    """Smith form of M over ``ring``.

    ``shape`` is needed only for matrices with zero rows or columns.
    """
    m = len(M) if shape is None else shape[0]
    n = (len(M[0]) if m else 0) if shape is None else shape[1]
    A = [list(row) for row in M]
    for row in A:
        if len(row) != n:
            raise ValueError("ragged matrix")
    P = _identity(m, ring)        # P M Q = D
    Q = _identity(n, ring)
    P_inv = _identity(m, ring)    # M = P_inv D Q_inv
    Q_inv = _identity(n, ring)
    zero = ring.zero

    def row_add(i, j, c):  # row_i += c row_j
        Ai, Aj = A[i], A[j]
        for k in range(n):
            if Aj[k]:
                Ai[k] = Ai[k] + c * Aj[k]
        Pi, Pj = P[i], P[j]
        for k in range(m):
            if Pj[k]:
                Pi[k] = Pi[k] + c * Pj[k]
        for row in P_inv:  # col_j -= c col_i
            if row[i]:
                row[j] = row[j] - c * row[i]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]
        for row in P_inv:
            row[i], row[j] = row[j], row[i]

    def row_scale(i, u):
        A[i] = [u * x if x else x for x in A[i]]
        P[i] = [u * x if x else x for x in P[i]]
        ui = ring.unit_inverse(u)
        for row in P_inv:
            if row[i]:
                row[i] = row[i] * ui

    def col_add(j, i, c):  # col_j += c col_i
        for row in A:
            if row[i]:
                row[j] = row[j] + c * row[i]
        for row in Q:
            if row[i]:
                row[j] = row[j] + c * row[i]
        Qi, Qj = Q_inv[i], Q_inv[j]  # row_i -= c row_j
        for k in range(n):
            if Qj[k]:
                Qi[k] = Qi[k] - c * Qj[k]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]
        Q_inv[i], Q_inv[j] = Q_inv[j], Q_inv[i]

    def rows_mix(i, j, x, y, al, be):
        # [row_i; row_j] <- [[x, y], [-be, al]] [row_i; row_j], determinant 1
        for X in (A, P):
            Xi, Xj = X[i], X[j]
            X[i] = [x * a + y * b for a, b in zip(Xi, Xj)]
            X[j] = [al * b - be * a for a, b in zip(Xi, Xj)]
        for row in P_inv:
            a, b = row[i], row[j]
            row[i] = al * a + be * b
            row[j] = x * b - y * a

    def cols_mix(i, j, x, y, al, be):
        for X in (A, Q):
            for row in X:
                a, b = row[i], row[j]
                row[i] = x * a + y * b
                row[j] = al * b - be * a
        Qi, Qj = Q_inv[i], Q_inv[j]
        Q_inv[i] = [al * a + be * b for a, b in zip(Qi, Qj)]
        Q_inv[j] = [x * b - y * a for a, b in zip(Qi, Qj)]

    t = 0
    while t < min(m, n):
        # pivot: smallest Euclidean size; ties broken by (column, row) order
        best = None
        for j in range(t, n):
            for i in range(t, m):
                x = A[i][j]
                if x:
                    s = ring.size(x)
                    if best is None or s < best[0]:
                        best = (s, i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)

        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    g, x, y, al, be = _bezout(ring, A[t][t], A[i][t])
                    rows_mix(t, i, x, y, al, be)
            for j in range(t + 1, n):
                if A[t][j]:
                    g, x, y, al, be = _bezout(ring, A[t][t], A[t][j])
                    cols_mix(t, j, x, y, al, be)
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            # row and column t are clear; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] and ring.divmod(A[i][j], A[t][t])[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, ring.one)
        u = ring.unit_normaliser(A[t][t])
        if u != ring.one:
            row_scale(t, u)
        t += 1

    return SmithDecomposition(U=P_inv, D=A, W=Q_inv, U_inv=P, W_inv=Q, rank=t)


def matmul(A, B, ring: EuclideanRing = HBAR_POLYS, inner: int | None = None):
    """Plain matrix product over ``ring``."""
    if inner is None:
        inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = ring.zero
            for k in range(inner):
                if row[k] and B[k][j]:
                    acc = acc + row[k] * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def integer_kernel_basis(M: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """A basis of the saturated lattice {x in Z^n : M x = 0}."""
    snf = smith_normal_form([list(r) for r in M], INTEGERS, shape=(len(M), ncols))
    Q = snf.W_inv
    return [[Q[i][j] for i in range(ncols)] for j in range(snf.rank, ncols)]


def integer_alternating_divisors(E: Sequence[Sequence[int]]) -> list[int]:
    """Elementary divisors d1 | d2 | ... | dm of a nondegenerate alternating integer form.

    The integer Smith form of an alternating matrix repeats each symplectic
    divisor twice; every other diagonal entry is returned.
    """
    n = len(E)
    if any(len(r) != n for r in E):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(n):
            if E[i][j] != -E[j][i]:
                raise ValueError("matrix is not alternating")
    if n % 2:
        raise ValueError("alternating form of odd size is degenerate")
    snf = smith_normal_form([list(r) for r in E], INTEGERS, shape=(n, n))
    if snf.rank < n:
        raise ValueError("degenerate alternating form (det E = 0)")
    diag = snf.diagonal
    pairs = diag[0::2]
    if pairs != diag[1::2]:
        raise AssertionError("alternating Smith form did not pair up")  # pragma: no cover
    return pairs
