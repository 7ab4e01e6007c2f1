"""Complex tori V/Lambda, Appell-Humbert data and the degeneracy subtorus.

Conventions used everywhere in the package:

* vectors of V are coordinate tuples in Q(i)^g, covectors of conj(V) likewise;
* H(v, w) = sum_ab v_a H_ab conj(w_b)  (linear in v, antilinear in w);
* E = Im H; on the lattice it must take integer values;
* the pairing of a covector l with v is  <l, v> = sum_i l_i conj(v_i);
* lattice elements are integer coefficient vectors n in Z^{2g} with respect to
  the generators lambda_1..lambda_{2g};
* a semicharacter is stored through phases r_i with chi(lambda_i) = exp(i pi r_i)
  and extended by  chi(sum n_i lambda_i) = exp(i pi (sum n_i r_i + sum_{i<j} n_i n_j E_ij)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, prod
from typing import Mapping, Sequence

from .exactalg import (
    INTEGERS,
    GaussianRational,
    ONE,
    ZERO,
    as_gr,
    integer_alternating_divisors,
    kernel_basis,
    smith_normal_form,
)
from .exactalg.linalg import determinant, inverse, rref
from .exterior import binom

Vector = tuple  # of GaussianRational


def _vec(v) -> Vector:
    return tuple(as_gr(x) for x in v)


def _mat(M) -> tuple:
    return tuple(tuple(as_gr(x) for x in row) for row in M)


def pairing(l: Sequence, v: Sequence) -> GaussianRational:
    """<l, v> = sum l_i conj(v_i)."""
    acc = ZERO
    for a, b in zip(l, v):
        if a and b:
            acc = acc + a * b.conjugate()
    return acc


def mod2(x: Fraction) -> Fraction:
    """Representative of x mod 2 in [0, 2)."""
    x = Fraction(x)
    return x - 2 * (x.numerator // (2 * x.denominator))


class SubtorusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lattice, forms, semicharacter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodLattice:
    g: int
    generators: tuple  # 2g vectors in Q(i)^g

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(_vec(v) for v in self.generators))

    @classmethod
    def standard(cls, g: int) -> "PeriodLattice":
        """Z^g + i Z^g with generators e_1..e_g, i e_1..i e_g."""
        gens = []
        for unit in (ONE, GaussianRational(0, 1)):
            for a in range(g):
                gens.append(tuple(unit if b == a else ZERO for b in range(g)))
        return cls(g, tuple(gens))

    def real_matrix(self) -> list[list[Fraction]]:
        """2g x 2g rational matrix; column i holds (Re, Im) coordinates of lambda_i."""
        rows = []
        for a in range(self.g):
            rows.append([v[a].re for v in self.generators])
            rows.append([v[a].im for v in self.generators])
        return rows

    def problems(self) -> list[str]:
        out = []
        if len(self.generators) != 2 * self.g:
            out.append(f"lattice has {len(self.generators)} generators, expected {2 * self.g}")
            return out
        if any(len(v) != self.g for v in self.generators):
            out.append("a lattice generator has the wrong number of coordinates")
            return out
        if determinant(self.real_matrix()) == 0:
            out.append("lattice generators are linearly dependent over R (not a full-rank lattice)")
        return out

    def vector(self, n: Sequence[int]) -> Vector:
        out = [ZERO] * self.g
        for c, v in zip(n, self.generators):
            if c:
                for a in range(self.g):
                    if v[a]:
                        out[a] = out[a] + v[a] * c
        return tuple(out)

    def change_basis(self, U: Sequence[Sequence[int]]) -> "PeriodLattice":
        """New generators lambda'_i = sum_j U[j][i] lambda_j (U unimodular)."""
        n = 2 * self.g
        return PeriodLattice(self.g, tuple(self.vector([U[j][i] for j in range(n)]) for i in range(n)))


@dataclass(frozen=True)
class HermitianNS:
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", _mat(self.matrix))

    @property
    def g(self) -> int:
        return len(self.matrix)

    @classmethod
    def zero(cls, g: int) -> "HermitianNS":
        return cls(tuple(tuple(ZERO for _ in range(g)) for _ in range(g)))

    def is_zero(self) -> bool:
        return not any(x for row in self.matrix for x in row)

    def __call__(self, v: Sequence, w: Sequence) -> GaussianRational:
        acc = ZERO
        for a, x in enumerate(v):
            if not x:
                continue
            row = self.matrix[a]
            for b, y in enumerate(w):
                if y and row[b]:
                    acc = acc + x * row[b] * y.conjugate()
        return acc

    def gradient(self, lam: Sequence) -> Vector:
        """Coefficients a with H(v, lam) = sum_a a_a v_a."""
        return tuple(sum((row[b] * as_gr(y).conjugate() for b, y in enumerate(lam) if y and row[b]), ZERO)
                     for row in self.matrix)

    def imaginary(self, v, w) -> Fraction:
        return self(v, w).im

    def symmetry_violations(self) -> list[tuple[int, int]]:
        g = self.g
        return [(a, b) for a in range(g) for b in range(a, g)
                if self.matrix[a][b] != self.matrix[b][a].conjugate()]

    def e_matrix(self, lattice: PeriodLattice) -> list[list[Fraction]]:
        gens = lattice.generators
        return [[self.imaginary(x, y) for y in gens] for x in gens]


@dataclass(frozen=True)
class Semicharacter:
    phases: tuple  # rationals r_i, chi(lambda_i) = exp(i pi r_i)

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(Fraction(r) for r in self.phases))

    @classmethod
    def trivial(cls, g: int) -> "Semicharacter":
        return cls(tuple(Fraction(0) for _ in range(2 * g)))

    def phase(self, n: Sequence[int], E: Sequence[Sequence]) -> Fraction:
        """Phase of chi(sum n_i lambda_i) in [0, 2)."""
        acc = Fraction(0)
        for i, ni in enumerate(n):
            if ni:
                acc += ni * self.phases[i]
                row = E[i]
                for j in range(i + 1, len(n)):
                    if n[j] and row[j]:
                        acc += ni * n[j] * row[j]
        return mod2(acc)

    def is_trivial_on(self, elements: Sequence[Sequence[int]], E) -> bool:
        return all(self.phase(n, E) == 0 for n in elements)

    def change_basis(self, U: Sequence[Sequence[int]], E) -> "Semicharacter":
        n = len(self.phases)
        return Semicharacter(tuple(self.phase([U[j][i] for j in range(n)], E) for i in range(n)))


@dataclass(frozen=True)
class ClassicalAHData:
    H: HermitianNS
    chi: Semicharacter


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: tuple = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, "where": list(self.where)}


def validate(ah: ClassicalAHData, lattice: PeriodLattice) -> list[Violation]:
    """Every violated invariant of (H, chi) on the lattice; empty means valid."""
    out: list[Violation] = []
    g = lattice.g
    for msg in lattice.problems():
        out.append(Violation("lattice", msg))
    if ah.H.g != g or any(len(r) != g for r in ah.H.matrix):
        out.append(Violation("shape", f"H must be {g}x{g}"))
        return out
    if len(ah.chi.phases) != 2 * g:
        out.append(Violation("shape", f"chi needs {2 * g} phases, got {len(ah.chi.phases)}"))
    for a, b in ah.H.symmetry_violations():
        out.append(Violation("hermitian symmetry", f"H[{a}][{b}] != conj(H[{b}][{a}])", (a, b)))
    if out and any(v.kind == "lattice" for v in out):
        return out
    E = ah.H.e_matrix(lattice)
    for i in range(2 * g):
        for j in range(i + 1, 2 * g):
            if E[i][j].denominator != 1:
                out.append(Violation("integrality",
                                     f"Im H(lambda_{i + 1}, lambda_{j + 1}) = {E[i][j]} is not an integer",
                                     (i, j)))
    return out


# ---------------------------------------------------------------------------
# degeneracy subtorus
# ---------------------------------------------------------------------------

def integer_E(H: HermitianNS, lattice: PeriodLattice) -> list[list[int]]:
    E = H.e_matrix(lattice)
    for row in E:
        for x in row:
            if x.denominator != 1:
                raise ValueError("Im H is not integral on the lattice")
    return [[int(x) for x in row] for row in E]


@dataclass(frozen=True)
class DegeneracyData:
    g: int
    g0: int
    V0_basis: tuple            # g0 vectors spanning ker H
    complement_basis: tuple    # g - g0 vectors
    s_matrix: tuple            # g0 x g: coordinates in V0_basis of the projection along the complement
    Lambda0_basis: tuple       # 2 g0 integer coefficient vectors (lattice elements in V0)
    quotient_lattice_basis: tuple  # 2(g - g0) integer coefficient vectors completing Lambda0
    E_quotient: tuple          # integer alternating form on the quotient lattice basis
    divisors: tuple            # elementary divisors of E_quotient
    k: int                     # negative inertia of H on the complement
    positive: int              # positive inertia

    @property
    def hbar_bar(self) -> int:
        """h^k of the nondegenerate quotient bundle: product of elementary divisors."""
        return prod(self.divisors) if self.divisors else 1

    def split(self, v: Sequence) -> tuple:
        """s(v): coordinates of the V0-component of v."""
        return tuple(sum((row[i] * as_gr(x) for i, x in enumerate(v) if x and row[i]), ZERO)
                     for row in self.s_matrix)


def _conj_matrix(M):
    return [[as_gr(x).conjugate() for x in row] for row in M]


def hermitian_inertia(G: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a Hermitian matrix by congruence pivoting."""
    A = [[as_gr(x) for x in row] for row in G]
    pos = neg = zero = 0
    while A:
        n = len(A)
        i = next((i for i in range(n) if A[i][i]), None)
        if i is None:
            pair = next(((a, b) for a in range(n) for b in range(a + 1, n) if A[a][b]), None)
            if pair is None:
                zero += n
                break
            a, b = pair
            # replace e_a by e_a + c e_b with c in {1, i}; diagonal becomes 2 Re(conj(c) A_ab)
            c = ONE if A[a][b].re else GaussianRational(0, 1)
            T = [[ONE if r == s else ZERO for s in range(n)] for r in range(n)]
            T[a][b] = c
            # A <- T A T^*
            TA = [[sum((T[r][k] * A[k][s] for k in range(n) if T[r][k] and A[k][s]), ZERO)
                   for s in range(n)] for r in range(n)]
            A = [[sum((TA[r][k] * T[s][k].conjugate() for k in range(n) if TA[r][k] and T[s][k]), ZERO)
                  for s in range(n)] for r in range(n)]
            continue
        d = A[i][i]
        if d.im:
            raise ValueError("matrix is not Hermitian")
        if d.re > 0:
            pos += 1
        else:
            neg += 1
        inv = d.inverse()
        keep = [r for r in range(n) if r != i]
        A = [[A[r][s] - A[r][i] * inv * A[i][s] for s in keep] for r in keep]
    return pos, neg, zero


def degeneracy_subtorus(H: HermitianNS, lattice: PeriodLattice,
                        complement: Sequence[Sequence] | None = None) -> DegeneracyData:
    """Kernel of H, its lattice, a complement, the quotient form and the index k.

    ``complement`` overrides the default complement (standard basis vectors at
    the non-pivot columns of the echelon basis of ker H).
    """
    g = lattice.g
    # ker H = {w : H(v, w) = 0 for all v} = {w : conj(H) w = 0}
    kern = kernel_basis(_conj_matrix(H.matrix), g) if g else []
    rows, piv = rref(kern, g) if kern else ([], [])
    V0 = tuple(tuple(r.get(c, ZERO) for c in range(g)) for r in rows)
    g0 = len(V0)
    if complement is None:
        pivset = set(piv)
        comp = tuple(tuple(ONE if c == f else ZERO for c in range(g)) for f in range(g) if f not in pivset)
    else:
        comp = tuple(_vec(v) for v in complement)
        if len(comp) != g - g0:
            raise ValueError(f"complement must have {g - g0} vectors")
    basis_matrix = [list(V0[a]) for a in range(g0)] + [list(c) for c in comp]  # rows
    if g and determinant(basis_matrix) == 0:
        raise ValueError("complement is not transversal to ker H")
    # v = x^T B  =>  x = v^T B^{-1}; V0-coordinates are the first g0 entries
    Binv = inverse(basis_matrix) if g else []
    s_matrix = tuple(tuple(Binv[i][a] for i in range(g)) for a in range(g0))

    # lattice elements n with H conj(sum n_i lambda_i) = 0, as rational linear equations
    E = integer_E(H, lattice)
    n2 = 2 * g
    cols = [H.gradient(lam) for lam in lattice.generators]  # column i: H conj(lambda_i)
    eqs = []
    for a in range(g):
        eqs.append([cols[i][a].re for i in range(n2)])
        eqs.append([cols[i][a].im for i in range(n2)])
    int_eqs = []
    for row in eqs:
        den = lcm(*(x.denominator for x in row)) if row else 1
        int_eqs.append([int(x * den) for x in row])
    snf = smith_normal_form(int_eqs, INTEGERS, shape=(len(int_eqs), n2))
    Q = snf.W_inv
    r = snf.rank
    lam0 = tuple(tuple(Q[i][j] for i in range(n2)) for j in range(r, n2))
    if len(lam0) != 2 * g0:
        raise SubtorusError(f"Lambda meets ker H in rank {len(lam0)}, expected {2 * g0}: "
                            "ker H does not define a subtorus")
    quot = tuple(tuple(Q[i][j] for i in range(n2)) for j in range(r))
    Eq = tuple(tuple(sum(u[a] * E[a][b] * w[b] for a in range(n2) for b in range(n2) if u[a] and w[b])
                     for w in quot) for u in quot)
    divisors = tuple(integer_alternating_divisors([list(row) for row in Eq])) if quot else ()
    gram = [[H(x, y) for y in comp] for x in comp]
    pos, neg, zero = hermitian_inertia(gram)
    if zero:
        raise ValueError("H is degenerate on the complement")  # cannot happen for a true complement
    return DegeneracyData(g=g, g0=g0, V0_basis=V0, complement_basis=comp, s_matrix=s_matrix,
                          Lambda0_basis=lam0, quotient_lattice_basis=quot, E_quotient=Eq,
                          divisors=divisors, k=neg, positive=pos)


def restrict_covector(l: Sequence, D: DegeneracyData) -> Vector:
    """l^0: the pullback of l to V0, in the dual coordinates of D.V0_basis."""
    return tuple(pairing(l, u) for u in D.V0_basis)


def index_k(H: HermitianNS, D: DegeneracyData) -> int:
    gram = [[H(x, y) for y in D.complement_basis] for x in D.complement_basis]
    return hermitian_inertia(gram)[1]


def chi_trivial_on_subtorus(ah: ClassicalAHData, lattice: PeriodLattice, D: DegeneracyData) -> bool:
    E = integer_E(ah.H, lattice)
    return ah.chi.is_trivial_on(D.Lambda0_basis, E)


def classical_dims(ah: ClassicalAHData, lattice: PeriodLattice,
                   D: DegeneracyData | None = None) -> list[int]:
    """h^0..h^g of the classical line bundle L(H, chi)."""
    D = degeneracy_subtorus(ah.H, lattice) if D is None else D
    g = lattice.g
    if not chi_trivial_on_subtorus(ah, lattice, D):
        return [0] * (g + 1)
    hb = D.hbar_bar
    return [hb * binom(D.g0, j - D.k) for j in range(g + 1)]


# ---------------------------------------------------------------------------
# the full input
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumAHData:
    """Lattice, classical data (H, chi), the series l(hbar) and a Poisson bivector."""

    lattice: PeriodLattice
    ah: ClassicalAHData
    l_series: Mapping[int, tuple] = field(default_factory=dict)
    poisson: tuple | None = None  # g x g antisymmetric matrix; None means zero

    def __post_init__(self):
        g = self.lattice.g
        clean = {}
        for m, vec in dict(self.l_series).items():
            m = int(m)
            if m < 1:
                raise ValueError("series indices start at 1")
            vec = _vec(vec)
            if len(vec) != g:
                raise ValueError(f"covector l_{m} has length {len(vec)}, expected {g}")
            clean[m] = vec
        object.__setattr__(self, "l_series", dict(sorted(clean.items())))
        P = self.poisson
        if P is None:
            P = tuple(tuple(ZERO for _ in range(g)) for _ in range(g))
        object.__setattr__(self, "poisson", _mat(P))

    @property
    def g(self) -> int:
        return self.lattice.g

    @property
    def H(self) -> HermitianNS:
        return self.ah.H

    @property
    def chi(self) -> Semicharacter:
        return self.ah.chi

    def l(self, m: int) -> Vector:
        return self.l_series.get(m, tuple(ZERO for _ in range(self.g)))

    def E(self) -> list[list[int]]:
        return integer_E(self.H, self.lattice)

    def with_series(self, l_series) -> "QuantumAHData":
        return QuantumAHData(self.lattice, self.ah, l_series, self.poisson)

    def change_lattice_basis(self, U: Sequence[Sequence[int]]) -> "QuantumAHData":
        E = self.E()
        return QuantumAHData(self.lattice.change_basis(U),
                             ClassicalAHData(self.H, self.chi.change_basis(U, E)),
                             self.l_series, self.poisson)
