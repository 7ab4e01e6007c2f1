"""Closed-form cohomology of deformed line bundles and its cross-checks.

Three answers are produced per degree and compared:

* ``formula`` -- the case analysis (vanishing / free / hbar^{t0}-torsion);
* ``smith``   -- Smith normal form of the model Koszul complex over C[hbar];
* ``spectral``-- E_infinity of the hbar-adic filtration of the truncated model,
  turned back into a module from its graded dimensions.

The model complex is  wedge^*(conj V0)^dual (x) C^{hbar_bar}, differential
l(hbar)^0 ^ -, shifted to start in degree k.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exactalg import CohomologyModule, GaussianRational, ONE, ZERO, as_gr
from .exactalg.linalg import inverse, rank
from .exterior import (
    KoszulHbarComplex,
    binom,
    oracle_cohomology,
    truncated_oracle_cohomology,
    wedge_matrix,
)
from .moyal import PoissonBivector, compatibility
from .spectral import e_infinity, koszul_filtered, module_from_graded
from .torus import (
    ClassicalAHData,
    DegeneracyData,
    HermitianNS,
    PeriodLattice,
    QuantumAHData,
    Semicharacter,
    chi_trivial_on_subtorus,
    classical_dims,
    degeneracy_subtorus,
    restrict_covector,
)

INFINITY = math.inf

VANISHING = "vanishing (χ|Λ₀ ≠ 1)"
FREE = "free"
CONSTANT = "free (constant deformation)"
TORSION = "torsion"


class TruncationTooSmall(ValueError):
    pass


class FormulaMismatch(AssertionError):
    """The rank computation and the binomial count of the torsion multiplicity differ."""


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def compute_t(data: QuantumAHData):
    support = [m for m, l in data.l_series.items() if any(l)]
    return min(support) if support else INFINITY


def restricted_series(data: QuantumAHData, D: DegeneracyData) -> dict:
    out = {}
    for m, l in data.l_series.items():
        r = restrict_covector(l, D)
        if any(r):
            out[m] = r
    return out


def compute_t0(data: QuantumAHData, D: DegeneracyData | None = None):
    D = degeneracy_subtorus(data.H, data.lattice) if D is None else D
    support = restricted_series(data, D)
    return min(support) if support else INFINITY


@dataclass(frozen=True)
class Analysis:
    data: QuantumAHData
    D: DegeneracyData
    chi_trivial: bool
    l0: dict
    t: object
    t0: object
    case: str

    @property
    def g(self):
        return self.data.g

    @property
    def g0(self):
        return self.D.g0

    @property
    def k(self):
        return self.D.k

    @property
    def hbar_bar(self):
        return self.D.hbar_bar

    def model(self) -> KoszulHbarComplex:
        mult = self.hbar_bar if self.chi_trivial else 0
        return KoszulHbarComplex(self.g0, self.l0, mult)


def analyse(data: QuantumAHData, complement: Sequence[Sequence] | None = None) -> Analysis:
    D = degeneracy_subtorus(data.H, data.lattice, complement)
    chi_ok = chi_trivial_on_subtorus(data.ah, data.lattice, D)
    l0 = restricted_series(data, D)
    t = compute_t(data)
    t0 = min(l0) if l0 else INFINITY
    if not chi_ok:
        case = VANISHING
    elif not l0:
        case = CONSTANT if t == INFINITY else FREE
    else:
        case = TORSION
    return Analysis(data, D, chi_ok, l0, t, t0, case)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def torsion_multiplicity(an: Analysis, j: int) -> int:
    """m_j = rank(l0_{t0} ^ on wedge^{j-k-1}) * hbar_bar, checked against the binomial count."""
    i = j - an.k - 1
    g0 = an.g0
    if i < 0 or i >= g0:
        by_rank = 0
    else:
        by_rank = rank(wedge_matrix(an.l0[an.t0], i, g0), binom(g0, i))
    by_rank *= an.hbar_bar
    by_binom = binom(g0 - 1, i) * an.hbar_bar
    if by_rank != by_binom:
        raise FormulaMismatch(f"degree {j}: rank count {by_rank} != binomial count {by_binom}")
    return by_rank


def cohomology(data: QuantumAHData, j: int, an: Analysis | None = None) -> CohomologyModule:
    an = analyse(data) if an is None else an
    if j < 0 or j > an.g or an.case == VANISHING:
        return CohomologyModule.zero()
    if an.case in (FREE, CONSTANT):
        return CohomologyModule(classical_dims(data.ah, data.lattice, an.D)[j], ())
    m = torsion_multiplicity(an, j)
    out = CohomologyModule.from_exponents(0, [an.t0] * m)
    if m and not (an.k + 1 <= j <= an.k + an.g0):
        raise FormulaMismatch(f"torsion in degree {j} outside k+1..k+g0")
    return out


def all_cohomology(data: QuantumAHData, an: Analysis | None = None) -> list[CohomologyModule]:
    an = analyse(data) if an is None else an
    return [cohomology(data, j, an) for j in range(an.g + 1)]


def truncated_cohomology(data: QuantumAHData, j: int, s: int | None = None,
                         an: Analysis | None = None) -> CohomologyModule:
    """H^j of the bundle reduced mod hbar^s (s <= t0): free of rank h^j over C[hbar]/hbar^s.

    Encoded as the C[[hbar]]-module (C[hbar]/hbar^s)^{h^j}.
    """
    an = analyse(data) if an is None else an
    if an.t0 == INFINITY:
        from .groupcoh import InfiniteOrder
        raise InfiniteOrder("t0 is infinite: the restricted series vanishes")
    s = an.t0 if s is None else s
    if s < 1 or s > an.t0:
        raise ValueError(f"truncation order {s} must lie in 1..t0={an.t0}")
    h = classical_dims(data.ah, data.lattice, an.D)[j] if 0 <= j <= an.g else 0
    return CohomologyModule.from_exponents(0, [s] * h)


def truncated_oracle(data: QuantumAHData, j: int, s: int, an: Analysis | None = None) -> CohomologyModule:
    """Smith-free brute force: cohomology of the model reduced mod hbar^s."""
    an = analyse(data) if an is None else an
    return truncated_oracle_cohomology(an.model(), j - an.k, s)


# ---------------------------------------------------------------------------
# oracles and the cross-check
# ---------------------------------------------------------------------------

def smith_oracle(an: Analysis) -> list[CohomologyModule]:
    K = an.model()
    return [oracle_cohomology(K, j - an.k) for j in range(an.g + 1)]


@dataclass
class SpectralOracle:
    modules: list
    graded: dict
    degeneration_page: int
    order: int
    clean_until: int
    pages: list = field(default_factory=list)


def spectral_order(an: Analysis, N: int) -> tuple[int, int]:
    """(order actually used, first truncation-affected level).

    Torsion exponents of the model never exceed the top of the restricted
    support m, and truncation artifacts sit at levels >= order - m; the order
    is enlarged so that the clean zone has room to show stabilisation.
    """
    m = max(an.l0) if an.l0 and an.chi_trivial else 0
    order = max(N, 2 * m + 2)
    return order, order - m


def spectral_oracle(an: Analysis, N: int, keep_pages: bool = False) -> SpectralOracle:
    order, clean = spectral_order(an, N)
    F = koszul_filtered(an.model(), order, degree_shift=an.k, flag_from=clean)
    res = e_infinity(F)
    mods = []
    for j in range(an.g + 1):
        graded = res.graded.get(j)
        if graded is None:
            mods.append(CohomologyModule.zero())
        else:
            mods.append(module_from_graded(graded, clean))
    return SpectralOracle(mods, {j: list(v) for j, v in res.graded.items()}, res.degeneration_page,
                          order, clean, res.pages if keep_pages else [])


@dataclass
class CohomologyReport:
    g: int
    case: str
    t: object
    t0: object
    g0: int
    k: int
    hbar_bar: int
    N: int
    formula: list
    smith: list
    spectral: list
    degeneration_page: int
    expected_degeneration_page: int
    spectral_order: int
    discrepancies: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.discrepancies

    def dims(self) -> list:
        return [m.complex_dimension() for m in self.formula]


def expected_degeneration(an: Analysis) -> int:
    return an.t0 + 1 if an.case == TORSION else 1


def cross_check(data: QuantumAHData, N: int | None = None, *,
                formula: Callable | None = None, complement=None) -> CohomologyReport:
    an = analyse(data, complement)
    default = (an.t0 + 3) if an.t0 != INFINITY else 3
    N = default if N is None else N
    if an.t0 != INFINITY and N < an.t0 + 2:
        raise TruncationTooSmall(f"hbar order {N} is below t0 + 2 = {an.t0 + 2}")
    fn = formula or (lambda d, j: cohomology(d, j, an))
    F = [fn(data, j) for j in range(an.g + 1)]
    S = smith_oracle(an)
    sp = spectral_oracle(an, N)
    P = sp.modules
    issues = []
    for j in range(an.g + 1):
        if not (F[j] == S[j] == P[j]):
            issues.append({"degree": j, "formula": str(F[j]), "smith": str(S[j]), "spectral": str(P[j])})
        else:
            dims = {F[j].complex_dimension(), S[j].complex_dimension(), P[j].complex_dimension()}
            if len(dims) != 1:
                issues.append({"degree": j, "dimension": sorted(map(str, dims))})
    exp_page = expected_degeneration(an)
    if sp.degeneration_page != exp_page:
        issues.append({"degeneration_page": sp.degeneration_page, "expected": exp_page})
    return CohomologyReport(an.g, an.case, an.t, an.t0, an.g0, an.k, an.hbar_bar, N, F, S, P,
                            sp.degeneration_page, exp_page, sp.order, issues)


# ---------------------------------------------------------------------------
# random fixtures
# ---------------------------------------------------------------------------

def _rand_gr(rng: random.Random, bound: int = 2, nonzero: bool = False) -> GaussianRational:
    while True:
        x = GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if x or not nonzero:
            return x


def _rand_covector(rng, g, support) -> tuple:
    while True:
        v = tuple(_rand_gr(rng) if i in support else ZERO for i in range(g))
        if any(v):
            return v


def random_gl(rng: random.Random, g: int, bound: int = 1) -> list[list]:
    """Random invertible matrix over Z[i] (unit upper times unit lower triangular, scaled)."""
    U = [[ONE if a == b else (_rand_gr(rng, bound) if b > a else ZERO) for b in range(g)] for a in range(g)]
    L = [[ONE if a == b else (_rand_gr(rng, bound) if b < a else ZERO) for b in range(g)] for a in range(g)]
    M = [[sum((U[a][c] * L[c][b] for c in range(g)), ZERO) for b in range(g)] for a in range(g)]
    return M


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> list[list[int]]:
    M = [[int(a == b) for b in range(n)] for a in range(n)]
    for _ in range(steps):
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if a == b:
            M[a] = [-x for x in M[a]]
            continue
        c = rng.choice([-1, 1, 2])
        M[a] = [x + c * y for x, y in zip(M[a], M[b])]
    return M


def change_coordinates(data: QuantumAHData, A: Sequence[Sequence]) -> QuantumAHData:
    """Same bundle in the coordinates v' = A v."""
    g = data.g
    A = [[as_gr(x) for x in row] for row in A]
    Ainv = inverse(A)
    gens = tuple(tuple(sum((A[a][b] * lam[b] for b in range(g)), ZERO) for a in range(g))
                 for lam in data.lattice.generators)
    Hm = data.H.matrix
    # H' = A^{-T} H conj(A^{-1})
    H2 = [[sum((Ainv[c][a] * Hm[c][d] * Ainv[d][b].conjugate()
                for c in range(g) for d in range(g) if Hm[c][d]), ZERO) for b in range(g)] for a in range(g)]
    # l' = conj(A^{-1})^T l
    series = {m: tuple(sum((Ainv[c][a].conjugate() * l[c] for c in range(g)), ZERO) for a in range(g))
              for m, l in data.l_series.items()}
    P = data.poisson
    P2 = [[sum((A[a][c] * P[c][d] * A[b][d] for c in range(g) for d in range(g) if P[c][d]), ZERO)
           for b in range(g)] for a in range(g)]
    return QuantumAHData(PeriodLattice(g, gens), ClassicalAHData(HermitianNS(H2), data.chi), series, P2)


@dataclass(frozen=True)
class FixtureSpec:
    g: int
    g0: int
    k: int
    hbar_bar: int
    t0: object          # int or INFINITY
    t: object = None    # defaults to t0; t < t0 puts the leading term off V0
    chi_trivial: bool = True
    extra_terms: int = 0


def random_data(rng: random.Random, spec: FixtureSpec, scramble: bool = True) -> QuantumAHData:
    """Random data with the prescribed invariants.

    H = diag(±d_1, ..., ±d_r, 0, ..., 0) on the standard lattice (last g0
    directions degenerate), then a random change of coordinates and of lattice
    basis when ``scramble`` is set.
    """
    g, g0, k = spec.g, spec.g0, spec.k
    nd = g - g0
    if not 0 <= g0 <= g or k > nd or (nd == 0 and spec.hbar_bar != 1):
        raise ValueError(f"inconsistent fixture {spec}")
    diag = [1] * nd
    if nd:
        diag[rng.randrange(nd)] = spec.hbar_bar
    signs = [-1] * k + [1] * (nd - k)
    rng.shuffle(signs)
    H = [[GaussianRational(diag[a] * signs[a]) if a == b and a < nd else ZERO for b in range(g)]
         for a in range(g)]
    lattice = PeriodLattice.standard(g)
    # generator order: e_0..e_{g-1}, i e_0..i e_{g-1}; V0 directions are a >= nd
    phases = [0] * (2 * g)
    for a in range(nd):
        phases[a] = rng.choice([0, 1, Fraction(1, 2), Fraction(1, 3)])
        phases[g + a] = rng.choice([0, 1, Fraction(1, 2)])
    if not spec.chi_trivial:
        if g0 == 0:
            raise ValueError("a nontrivial restriction needs g0 > 0")
        phases[rng.choice([nd, g + nd])] = rng.choice([1, Fraction(1, 2), Fraction(2, 3)])
    chi = Semicharacter(tuple(phases))
    series = {}
    t0, t = spec.t0, spec.t if spec.t is not None else spec.t0
    on_v0 = set(range(nd, g))
    off_v0 = set(range(nd))
    if t != INFINITY:
        if t0 == INFINITY or t < t0:
            if not off_v0:
                raise ValueError("t < t0 needs nondegenerate directions")
            series[t] = _rand_covector(rng, g, off_v0)
        if t0 != INFINITY:
            if t0 < t:
                raise ValueError("t0 < t is impossible")
            prev = series.get(t0, tuple(ZERO for _ in range(g)))
            new = _rand_covector(rng, g, on_v0)
            series[t0] = tuple(a + b for a, b in zip(prev, new))
            for m in range(t, t0):
                if m not in series and rng.random() < 0.5 and off_v0:
                    series[m] = _rand_covector(rng, g, off_v0)
        top = max(series) if series else 0
        for e in range(spec.extra_terms):
            series[top + 1 + e] = _rand_covector(rng, g, set(range(g)))
    # Poisson bivector with vanishing nondegenerate block keeps H^T Pi H = 0
    P = [[ZERO] * g for _ in range(g)]
    for a in range(g):
        for b in range(a + 1, g):
            if a >= nd or b >= nd:
                x = _rand_gr(rng, 1)
                P[a][b], P[b][a] = x, -x
    data = QuantumAHData(lattice, ClassicalAHData(HermitianNS(H), chi), series, P)
    if scramble:
        data = change_coordinates(data, random_gl(rng, g))
        data = data.change_lattice_basis(random_unimodular(rng, 2 * g))
    assert compatibility(data.H, PoissonBivector(data.poisson))
    return data


def fixture_battery(max_g: int = 4, t0_values=(1, 2), hbar_values=(1, 2, 3)) -> list[FixtureSpec]:
    """g <= max_g, g0 in 1..g, k in {0,1}, hbar_bar in hbar_values, t0 in t0_values."""
    out = []
    for g in range(1, max_g + 1):
        for g0 in range(1, g + 1):
            for k in (0, 1):
                if k > g - g0:
                    continue
                for hb in hbar_values:
                    if g0 == g and hb != 1:
                        continue
                    for t0 in t0_values:
                        out.append(FixtureSpec(g, g0, k, hb, t0))
    return out
