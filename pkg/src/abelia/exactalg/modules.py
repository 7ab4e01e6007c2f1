"""Finitely generated modules over C[[hbar]] and cohomology of polynomial complexes.

A module is recorded by its free rank and the multiset of hbar-power torsion
exponents; by the structure theorem over a PID this is a complete invariant.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .linalg import Echelon
from .poly import HbarPoly
from .scalars import GaussianRational
from .smith import HBAR_POLYS, matmul, smith_normal_form


class CompositionNonzero(ValueError):
    """Raised when the two maps handed over do not compose to zero."""


def _normal_torsion(pairs) -> tuple[tuple[int, int], ...]:
    acc: Counter = Counter()
    for a, m in pairs:
        if a < 1 or m < 0:
            raise ValueError(f"bad torsion pair {(a, m)}")
        if m:
            acc[a] += m
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class CohomologyModule:
    """C[[hbar]]^free_rank  +  sum over (a, m) of (C[hbar]/hbar^a)^m."""

    free_rank: int = 0
    torsion: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", _normal_torsion(self.torsion))

    @classmethod
    def zero(cls) -> "CohomologyModule":
        return cls(0, ())

    @classmethod
    def from_exponents(cls, free_rank: int, exponents) -> "CohomologyModule":
        return cls(free_rank, tuple(Counter(exponents).items()))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_torsion(self) -> bool:
        return self.free_rank == 0

    def exponents(self) -> list[int]:
        return [a for a, m in self.torsion for _ in range(m)]

    def dim_truncated(self, n: int) -> int:
        """dim over C of M / hbar^n M."""
        return self.free_rank * n + sum(min(a, n) * m for a, m in self.torsion)

    def complex_dimension(self) -> int | None:
        """dim over C, or None when the module has a free part."""
        if self.free_rank:
            return None
        return sum(a * m for a, m in self.torsion)

    def structure(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("ℂ[[ħ]]" + (f"^{self.free_rank}" if self.free_rank > 1 else ""))
        for a, m in self.torsion:
            cyc = "ℂ[ħ]/ħ" + (f"^{a}" if a > 1 else "")
            parts.append(cyc if m == 1 else f"({cyc})^{m}")
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": [list(p) for p in self.torsion]}

    @classmethod
    def from_json(cls, obj) -> "CohomologyModule":
        return cls(int(obj["free_rank"]), tuple((int(a), int(m)) for a, m in obj["torsion"]))

    def __str__(self):
        return self.structure()


def _as_poly_matrix(M):
    return [[x if isinstance(x, HbarPoly) else HbarPoly([x]) for x in row] for row in M]


def complex_cohomology_over_pid(d_prev: Sequence[Sequence], d_next: Sequence[Sequence],
                                dim: int | None = None, prev_dim: int | None = None,
                                next_dim: int | None = None) -> CohomologyModule:
    """ker(d_next) / im(d_prev) for  C_prev --d_prev--> C^dim --d_next--> C_next.

    Matrices act on column vectors: d_prev is dim x prev_dim and d_next is
    next_dim x dim.  The result is localised at (hbar): invariant factors that
    are units or prime to hbar are dropped.
    """
    A = _as_poly_matrix(d_prev)
    B = _as_poly_matrix(d_next)
    if dim is None:
        dim = len(A) if A else (len(B[0]) if B else 0)
    m_prev = prev_dim if prev_dim is not None else (len(A[0]) if A else 0)
    m_next = next_dim if next_dim is not None else len(B)
    if A and len(A) != dim:
        raise ValueError("d_prev has the wrong number of rows")
    if B and len(B[0]) != dim:
        raise ValueError("d_next has the wrong number of columns")
    if A and B:
        comp = matmul(B, A, HBAR_POLYS, inner=dim)
        if any(x for row in comp for x in row):
            raise CompositionNonzero("d_next . d_prev is not zero")
    if not A:
        A = [[HBAR_POLYS.zero] * m_prev for _ in range(dim)]
    if not B:
        B = [[HBAR_POLYS.zero] * dim for _ in range(m_next)]
    snf_prev = smith_normal_form(A, HBAR_POLYS, shape=(dim, m_prev))
    snf_next = smith_normal_form(B, HBAR_POLYS, shape=(m_next, dim))
    free = dim - snf_next.rank - snf_prev.rank
    exps = []
    for d in snf_prev.diagonal:
        a = d.hbar_valuation()
        if a:
            exps.append(a)
    return CohomologyModule.from_exponents(free, exps)


# ---------------------------------------------------------------------------
# brute force over the truncated ring C[hbar]/hbar^N
# ---------------------------------------------------------------------------

def _truncated_columns(M, rows: int, cols: int, n: int) -> list[dict]:
    """Sparse images of the C-basis (col c, power e) -> index c*n + e."""
    out = []
    for c in range(cols):
        for e in range(n):
            v = {}
            for r in range(rows):
                p = M[r][c]
                for k, coef in enumerate(p.coeffs):
                    if coef and e + k < n:
                        v[r * n + e + k] = coef
            out.append(v)
    return out


def _kernel(columns: list[dict], ncols: int) -> list[dict]:
    """Kernel of the map whose column j is columns[j], as sparse vectors."""
    ech = Echelon()
    kernel = []
    for j, col in enumerate(columns):
        v, t = ech.reduce(col, {j: GaussianRational(1)})
        if v:
            ech.add(v, t)
        else:
            kernel.append(t)
    return kernel


def _shift(vec: dict, p: int, n: int) -> dict:
    out = {}
    for idx, x in vec.items():
        c, e = divmod(idx, n)
        if e + p < n:
            out[c * n + e + p] = x
    return out


def truncated_cohomology(d_prev, d_next, dim: int, prev_dim: int, next_dim: int,
                         n: int) -> CohomologyModule:
    """Module structure of H of the complex reduced mod hbar^n, by linear algebra over C.

    Returned as a torsion module whose exponents are at most n (a summand of
    length n is a free C[hbar]/hbar^n summand).
    """
    A = _as_poly_matrix(d_prev) if prev_dim else []
    B = _as_poly_matrix(d_next) if next_dim else []
    cycles = _kernel(_truncated_columns(B, next_dim, dim, n), dim * n) if next_dim else \
        [{j: GaussianRational(1)} for j in range(dim * n)]
    bound = Echelon()
    if prev_dim:
        for col in _truncated_columns(A, dim, prev_dim, n):
            if col:
                bound.add(col)
    base = len(bound)
    # dims of hbar^p H for p = 0..n
    dims = []
    for p in range(n + 1):
        ech = Echelon()
        ech.rows = {k: dict(v) for k, v in bound.rows.items()}
        for z in cycles:
            ech.add(_shift(z, p, n))
        dims.append(len(ech) - base)
    # number of cyclic summands of length >= s is dim hbar^{s-1}H - dim hbar^s H
    at_least = [dims[s - 1] - dims[s] for s in range(1, n + 1)] + [0]
    pairs = [(s, at_least[s - 1] - at_least[s]) for s in range(1, n + 1)]
    return CohomologyModule(0, tuple(pairs))
