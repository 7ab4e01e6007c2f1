"""Exterior algebra over Q(i)^n and the hbar-deformed Koszul complex.

Basis j-vectors are strictly increasing index tuples (0-based).  The Koszul
complex has differential  w -> l(hbar) ^ w  with l(hbar) = sum_m hbar^m l_m.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .exactalg import (
    CohomologyModule,
    GaussianRational,
    HbarPoly,
    ZERO,
    as_gr,
    complex_cohomology_over_pid,
    rank,
    truncated_cohomology,
)
from .exactalg.linalg import matvec


@lru_cache(maxsize=None)
def basis(n: int, j: int) -> tuple[tuple[int, ...], ...]:
    if j < 0 or j > n:
        return ()
    return tuple(combinations(range(n), j))


@lru_cache(maxsize=None)
def basis_index(n: int, j: int) -> dict:
    return {I: k for k, I in enumerate(basis(n, j))}


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted union of e_a ^ e_b, or (0, None) if they share an index."""
    if set(a) & set(b):
        return 0, None
    # count pairs (x in a, y in b) with x > y
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


class MultiVector:
    """A homogeneous element of the exterior algebra of Q(i)^dim."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Mapping | None = None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for I, c in (coeffs or {}).items():
            I = tuple(I)
            if len(I) != degree or any(x >= y for x, y in zip(I, I[1:])):
                raise ValueError(f"index tuple {I} is not strictly increasing of length {degree}")
            if I and (I[0] < 0 or I[-1] >= dim):
                raise ValueError(f"index tuple {I} out of range for dimension {dim}")
            c = as_gr(c)
            if c:
                clean[I] = c
        self.coeffs = clean

    @classmethod
    def covector(cls, vec: Sequence) -> "MultiVector":
        return cls(len(vec), 1, {(i,): x for i, x in enumerate(vec) if x})

    @classmethod
    def basis_vector(cls, dim: int, I: Sequence[int]) -> "MultiVector":
        return cls(dim, len(I), {tuple(I): 1})

    @classmethod
    def scalar(cls, dim: int, c=1) -> "MultiVector":
        return cls(dim, 0, {(): c})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        if not self.coeffs and not other.coeffs:
            return self.dim == other.dim
        return (self.dim, self.degree, self.coeffs) == (other.dim, other.degree, other.coeffs)

    def __add__(self, other: "MultiVector") -> "MultiVector":
        if other.degree != self.degree and other and self:
            raise ValueError("adding multivectors of different degree")
        deg = self.degree if self else other.degree
        out = dict(self.coeffs)
        for I, c in other.coeffs.items():
            out[I] = out.get(I, ZERO) + c
        return MultiVector(self.dim, deg, out)

    def __neg__(self):
        return MultiVector(self.dim, self.degree, {I: -c for I, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MultiVector":
        c = as_gr(c)
        return MultiVector(self.dim, self.degree, {I: c * x for I, x in self.coeffs.items()})

    def wedge(self, other: "MultiVector") -> "MultiVector":
        if self.dim != other.dim:
            raise ValueError("multivectors live in different exterior algebras")
        deg = self.degree + other.degree
        if deg > self.dim:
            # past the top degree everything vanishes; clamp rather than fail
            return MultiVector(self.dim, self.dim)
        out: dict = {}
        for I, a in self.coeffs.items():
            for J, b in other.coeffs.items():
                s, K = _merge_sign(I, J)
                if s:
                    out[K] = out.get(K, ZERO) + (a * b if s > 0 else -(a * b))
        return MultiVector(self.dim, deg, out)

    __xor__ = wedge

    def to_vector(self) -> list:
        idx = basis_index(self.dim, self.degree)
        v = [ZERO] * len(idx)
        for I, c in self.coeffs.items():
            v[idx[I]] = c
        return v

    @classmethod
    def from_vector(cls, dim: int, degree: int, vec: Sequence) -> "MultiVector":
        return cls(dim, degree, {I: x for I, x in zip(basis(dim, degree), vec) if x})

    def __repr__(self):
        if not self.coeffs:
            return f"MultiVector(0; deg={self.degree})"
        terms = " + ".join(f"({c})e{''.join(str(i + 1) for i in I)}" for I, c in sorted(self.coeffs.items()))
        return f"MultiVector({terms})"


def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    return a.wedge(b)


def wedge_matrix(l: Sequence, j: int, n: int | None = None) -> list[list[GaussianRational]]:
    """Matrix of  w -> l ^ w  from degree j to degree j+1 (acting on columns)."""
    n = len(l) if n is None else n
    rows = basis(n, j + 1)
    cols = basis(n, j)
    ridx = basis_index(n, j + 1)
    M = [[ZERO] * len(cols) for _ in rows]
    for c, J in enumerate(cols):
        for i, x in enumerate(l):
            if not x:
                continue
            s, K = _merge_sign((i,), J)
            if s:
                M[ridx[K]][c] = as_gr(x) if s > 0 else -as_gr(x)
    return M


def koszul_kernel_dim(l: Sequence, j: int, g: int | None = None) -> int:
    """dim ker( ^l : wedge^j -> wedge^{j+1} ), by elimination."""
    g = len(l) if g is None else g
    if len(l) != g:
        raise ValueError("covector length differs from g")
    if not any(as_gr(x) for x in l):
        raise ValueError("zero covector: the Koszul map is zero")
    if j < 0 or j > g:
        raise ValueError(f"degree {j} outside 0..{g}")
    ncols = comb(g, j)
    if j == g:
        return ncols
    return ncols - rank(wedge_matrix(l, j, g), ncols)


def binom(n: int, k: int) -> int:
    """Binomial coefficient with C(n, k) = 0 outside 0 <= k <= n (so C(n, -1) = 0)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class KoszulHbarComplex:
    """wedge^* (Q(i)^g) (x) C^mult over Q(i)[hbar] with d = (sum_m hbar^m l_m) ^ -.

    ``l_series`` maps m >= 1 to a covector; ``mult`` tensors with a trivial
    multiplicity space (identity on it).
    """

    g: int
    l_series: Mapping[int, tuple] = field(default_factory=dict)
    mult: int = 1

    def __post_init__(self):
        clean = {}
        for m, vec in dict(self.l_series).items():
            m = int(m)
            if m < 1:
                raise ValueError("series indices start at 1")
            vec = tuple(as_gr(x) for x in vec)
            if len(vec) != self.g:
                raise ValueError(f"covector l_{m} has length {len(vec)}, expected {self.g}")
            if any(vec):
                clean[m] = vec
        object.__setattr__(self, "l_series", dict(sorted(clean.items())))

    def rank_in_degree(self, j: int) -> int:
        return binom(self.g, j) * self.mult

    def differential(self, j: int) -> list[list[HbarPoly]]:
        """Polynomial matrix of d: degree j -> degree j+1."""
        rows = self.rank_in_degree(j + 1)
        cols = self.rank_in_degree(j)
        D = [[HbarPoly() for _ in range(cols)] for _ in range(rows)]
        if not rows or not cols:
            return D
        nb_r, nb_c = binom(self.g, j + 1), binom(self.g, j)
        for m, l in self.l_series.items():
            W = wedge_matrix(l, j, self.g)
            mono = HbarPoly.monomial(m)
            for r in range(nb_r):
                for c in range(nb_c):
                    x = W[r][c]
                    if x:
                        for u in range(self.mult):
                            rr, cc = r * self.mult + u, c * self.mult + u
                            D[rr][cc] = D[rr][cc] + mono * x
        return D

    def check_square_zero(self) -> bool:
        from .exactalg.smith import HBAR_POLYS, matmul
        for j in range(self.g - 1):
            a = self.differential(j)
            b = self.differential(j + 1)
            prod = matmul(b, a, HBAR_POLYS, inner=self.rank_in_degree(j + 1))
            if any(x for row in prod for x in row):
                return False
        return True

    def change_basis(self, P: Sequence[Sequence]) -> "KoszulHbarComplex":
        """Apply the same invertible linear map to every l_m."""
        return KoszulHbarComplex(self.g, {m: tuple(matvec(P, l)) for m, l in self.l_series.items()},
                                 self.mult)

    def _maps(self, j: int):
        prev = self.differential(j - 1) if j >= 1 else []
        nxt = self.differential(j) if j < self.g else []
        return prev, nxt, self.rank_in_degree(j - 1), self.rank_in_degree(j + 1)


def oracle_cohomology(K: KoszulHbarComplex, j: int) -> CohomologyModule:
    """H^j of the Koszul-hbar complex as a C[[hbar]]-module, via Smith normal form."""
    if j < 0 or j > K.g:
        return CohomologyModule.zero()
    prev, nxt, m_prev, m_next = K._maps(j)
    return complex_cohomology_over_pid(prev, nxt, K.rank_in_degree(j), m_prev, m_next)


def truncated_oracle_cohomology(K: KoszulHbarComplex, j: int, n: int) -> CohomologyModule:
    """H^j of the complex reduced mod hbar^n, with exponents capped at n."""
    if j < 0 or j > K.g:
        return CohomologyModule.zero()
    prev, nxt, m_prev, m_next = K._maps(j)
    return truncated_cohomology(prev, nxt, K.rank_in_degree(j), m_prev, m_next, n)
