"""Exact Gauss elimination over Q(i).

Matrices are lists of rows.  Internally rows are sparse dicts ``{col: value}``,
which keeps the exterior-algebra matrices (mostly zeros) cheap.  Pivoting is
deterministic: the first nonzero column, taking the lowest-index row that has it.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .scalars import GaussianRational, ZERO, ONE, as_gr

SparseVec = dict  # {index: GaussianRational}


class DimensionMismatch(ValueError):
    pass


def to_sparse(row: Sequence) -> SparseVec:
    return {j: as_gr(x) for j, x in enumerate(row) if x}


def to_dense(vec: SparseVec, n: int) -> list:
    out = [ZERO] * n
    for j, x in vec.items():
        out[j] = x
    return out


def _axpy(y: SparseVec, c: GaussianRational, x: SparseVec) -> None:
    """y += c * x, in place, dropping zeros."""
    for j, v in x.items():
        w = y.get(j)
        if w is None:
            y[j] = c * v
        else:
            s = w + c * v
            if s:
                y[j] = s
            else:
                del y[j]


class Echelon:
    """An incrementally built, fully reduced echelon basis of a subspace.

    Each stored row may carry a sparse ``tag`` vector; reductions accumulate the
    tags so that ``reduce`` also returns coordinates relative to tagged inputs.
    """

    def __init__(self):
        self.rows: dict[int, SparseVec] = {}   # pivot column -> row (pivot entry 1)
        self.tags: dict[int, SparseVec] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: SparseVec, tag: SparseVec | None = None):
        """Return (residual, tag') where vec = residual + sum c_p row_p and
        tag' = tag - sum c_p tag_p."""
        v = dict(vec)
        t = dict(tag) if tag else {}
        # rows are fully reduced, so clearing one pivot never refills another
        for p in [p for p in v if p in self.rows]:
            c = v[p]
            _axpy(v, -c, self.rows[p])
            trow = self.tags.get(p)
            if trow:
                _axpy(t, -c, trow)
        return v, t

    def coordinates(self, vec: SparseVec) -> SparseVec:
        """Coordinates of ``vec`` in terms of the tags of the inserted vectors.

        Raises ValueError if vec is outside the span.
        """
        v, t = self.reduce(vec)
        if v:
            raise ValueError("vector is not in the span")
        return {j: -x for j, x in t.items()}

    def add(self, vec: SparseVec, tag: SparseVec | None = None) -> bool:
        """Insert vec; return False if it was already in the span."""
        v, t = self.reduce(vec, tag)
        if not v:
            return False
        p = min(v)
        inv = v[p].inverse()
        v = {j: x * inv for j, x in v.items()}
        t = {j: x * inv for j, x in t.items()}
        # keep the basis fully reduced
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                _axpy(row, -c, v)
                if t:
                    trow = self.tags.setdefault(q, {})
                    _axpy(trow, -c, t)
        self.rows[p] = v
        if t:
            self.tags[p] = t
        return True

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)[0]

    def basis(self) -> list[SparseVec]:
        return [dict(self.rows[p]) for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)


def span_echelon(vectors: Iterable[SparseVec]) -> Echelon:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech


def _shape(M: Sequence[Sequence], ncols: int | None) -> tuple[int, int]:
    m = len(M)
    n = ncols if ncols is not None else (len(M[0]) if m else 0)
    for row in M:
        if len(row) != n:
            raise DimensionMismatch(f"row of length {len(row)} in a matrix with {n} columns")
    return m, n


def rref(M: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form; returns (rows as sparse dicts, pivot columns)."""
    _shape(M, ncols)
    ech = Echelon()
    for row in M:
        ech.add(to_sparse(row))
    piv = ech.pivots()
    return [ech.rows[p] for p in piv], piv


def rank(M: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(M, ncols)[1])


def kernel_basis(M: Sequence[Sequence], ncols: int | None = None) -> list[list[GaussianRational]]:
    """Basis of {x : M x = 0}, one vector per free column (in increasing order)."""
    m, n = _shape(M, ncols)
    rows, piv = rref(M, n)
    pivset = set(piv)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        x = [ZERO] * n
        x[f] = ONE
        for r, p in zip(rows, piv):
            c = r.get(f)
            if c:
                x[p] = -c
        out.append(x)
    return out


def sparse_kernel_basis(rows: Sequence[SparseVec], n: int) -> list[SparseVec]:
    """kernel_basis for a matrix already given by sparse rows."""
    ech = Echelon()
    for r in rows:
        ech.add(r)
    piv = ech.pivots()
    pivset = set(piv)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        x = {f: ONE}
        for p in piv:
            c = ech.rows[p].get(f)
            if c:
                x[p] = -c
        out.append(x)
    return out


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    m, n = _shape(M, ncols)
    return [[M[i][j] for i in range(m)] for j in range(n)]


def image_basis(M: Sequence[Sequence], ncols: int | None = None) -> list[list[GaussianRational]]:
    """Basis (reduced echelon) of the column space of M."""
    m, n = _shape(M, ncols)
    cols = transpose(M, n) if m else []
    rows, _ = rref(cols, m) if cols else ([], [])
    return [to_dense(r, m) for r in rows]


def subspace_quotient_dim(U: Sequence[Sequence], W: Sequence[Sequence], dim: int) -> int:
    """dim (span U + span W) / span W for vectors in Q(i)^dim."""
    ech = Echelon()
    for w in W:
        if len(w) != dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        ech.add(to_sparse(w))
    base = len(ech)
    for u in U:
        if len(u) != dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        ech.add(to_sparse(u))
    return len(ech) - base


def matvec(M: Sequence[Sequence], x: Sequence) -> list:
    out = []
    for row in M:
        acc = ZERO
        for a, b in zip(row, x):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if A and len(A[0]) != len(B):
        raise DimensionMismatch("inner dimensions differ")
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = ZERO
            for k, a in enumerate(row):
                if a:
                    b = B[k][j]
                    if b:
                        acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def solve(M: Sequence[Sequence], b: Sequence) -> list | None:
    """One solution of M x = b, or None if inconsistent."""
    m, n = _shape(M, None)
    aug = [list(M[i]) + [as_gr(b[i])] for i in range(m)]
    rows, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [ZERO] * n
    for r, p in zip(rows, piv):
        x[p] = r.get(n, ZERO)
    return x


def determinant(M: Sequence[Sequence]) -> GaussianRational:
    n = len(M)
    A = [[as_gr(x) for x in row] for row in M]
    det = ONE
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return ZERO
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        piv = A[c][c]
        det = det * piv
        inv = piv.inverse()
        for r in range(c + 1, n):
            f = A[r][c]
            if f:
                f = f * inv
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


def inverse(M: Sequence[Sequence]) -> list[list]:
    n = len(M)
    aug = [list(M[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    rows, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    return [[r.get(n + j, ZERO) for j in range(n)] for r in rows[:n]]


def identity(n: int) -> list[list]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def conj_transpose(M: Sequence[Sequence]) -> list[list]:
    return [[as_gr(M[i][j]).conjugate() for i in range(len(M))] for j in range(len(M[0]) if M else 0)]
