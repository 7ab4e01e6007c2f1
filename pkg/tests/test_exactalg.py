import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abelia.exactalg import (
    HBAR_POLYS,
    CohomologyModule,
    CompositionNonzero,
    GaussianRational as GR,
    HbarPoly,
    HbarSeries,
    PiScalar,
    complex_cohomology_over_pid,
    image_basis,
    integer_alternating_divisors,
    kernel_basis,
    rank,
    smith_normal_form,
    subspace_quotient_dim,
    truncated_cohomology,
)
from abelia.exactalg.smith import matmul

rationals = st.fractions(max_denominator=20).filter(lambda q: abs(q) < 50)
gaussians = st.builds(GR, rationals, rationals)
H = HbarPoly.monomial(1)


def P(*cs):
    return HbarPoly(cs)


# -- scalars -----------------------------------------------------------------

@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if a:
        assert a * a.inverse() == GR(1)


def test_canonical_form():
    x = GR(Fraction(2, 4), Fraction(-3, 6))
    assert x.re == Fraction(1, 2) and x.im == Fraction(-1, 2)
    assert x.re.denominator > 0


def test_hbar_series_truncates_products():
    a = HbarSeries.monomial(2, 1, 3)
    assert (a * a).is_zero()
    one_plus = HbarSeries.one(4) + HbarSeries.monomial(1, 1, 4)
    inv = one_plus.inverse()
    assert (inv * one_plus) == HbarSeries.one(4)


def test_exp_of_hbar_pi_square():
    x = HbarSeries.monomial(1, PiScalar.pi_power(2), 4)
    e = x.exp()
    # coefficient of hbar^3 is pi^6 / 6
    assert e.terms[3] == PiScalar.pi_power(6, Fraction(1, 6))


# -- Smith normal form -------------------------------------------------------------

def _check_smith(M, shape=None):
    S = smith_normal_form(M, HBAR_POLYS, shape)
    m, n = shape if shape else (len(M), len(M[0]))
    UD = matmul(S.U, S.D, HBAR_POLYS, inner=m)
    assert matmul(UD, S.W, HBAR_POLYS, inner=n) == [[x if isinstance(x, HbarPoly) else HbarPoly([x])
                                                     for x in row] for row in M]
    diag = S.diagonal
    for a, b in zip(diag, diag[1:]):
        assert not HBAR_POLYS.divmod(b, a)[1]
    # U and W are invertible over C[hbar]: their stored inverses multiply back to 1
    for X, Xi, k in ((S.U, S.U_inv, m), (S.W, S.W_inv, n)):
        prod = matmul(X, Xi, HBAR_POLYS, inner=k)
        assert all(prod[i][j] == (1 if i == j else 0) for i in range(k) for j in range(k))
    return S


def test_smith_1x1():
    S = _check_smith([[P(0, 0, 1)]])
    assert S.diagonal == [P(0, 0, 1)]
    assert S.U == [[P(1)]] and S.W == [[P(1)]]


def test_smith_2x2_triangular():
    S = _check_smith([[H, H], [P(), P(0, 0, 1)]])
    assert [d.hbar_valuation() for d in S.diagonal] == [1, 2]


def test_smith_zero_matrix():
    S = _check_smith([[P(), P()], [P(), P()]])
    assert S.rank == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_smith_random_recomposes(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 3), rng.randint(1, 3)
    M = [[P(*[rng.randint(-2, 2) for _ in range(rng.randint(0, 3))]) for _ in range(n)] for _ in range(m)]
    _check_smith(M)


# -- cohomology over the PID ----------------------------------------------------

def test_cohomology_kernel_of_hbar_row():
    mod = complex_cohomology_over_pid([], [[H, P()]], dim=2, prev_dim=0, next_dim=1)
    assert mod == CohomologyModule(1, ())


def test_cohomology_coker_of_hbar():
    mod = complex_cohomology_over_pid([[H]], [], dim=1, prev_dim=1, next_dim=0)
    assert mod == CohomologyModule(0, ((1, 1),))


def test_cohomology_zero_maps():
    assert complex_cohomology_over_pid([], [], dim=3, prev_dim=0, next_dim=0) == CohomologyModule(3, ())


def test_composition_must_vanish():
    with pytest.raises(CompositionNonzero):
        complex_cohomology_over_pid([[P(1)]], [[P(1)]], dim=1, prev_dim=1, next_dim=1)


def test_prime_to_hbar_torsion_is_dropped():
    mod = complex_cohomology_over_pid([[P(1, 1)]], [], dim=1, prev_dim=1, next_dim=0)
    assert mod.is_zero


def _random_complex(rng, a, b, c):
    """C^a -> C^b -> C^c with composition zero."""
    d_prev = [[P(*[rng.randint(-1, 1) for _ in range(rng.randint(0, 2))]) for _ in range(a)] for _ in range(b)]
    S = smith_normal_form(d_prev, HBAR_POLYS, (b, a))
    # rows of U_inv past the rank kill the image of d_prev
    kill = S.U_inv[S.rank:]
    d_next = []
    for _ in range(c):
        row = [P() for _ in range(b)]
        for r in kill:
            coef = P(*[rng.randint(-1, 1) for _ in range(2)]) * HbarPoly.monomial(rng.randint(0, 2))
            row = [x + coef * y for x, y in zip(row, r)]
        d_next.append(row)
    return d_prev, d_next


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_truncated_dimensions_follow_universal_coefficients(seed):
    """dim H(C/hbar^N) = free*N + sum min(a,N) over H^j torsion and over H^{j+1} torsion."""
    rng = random.Random(seed)
    a, b, c = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
    d_prev, d_next = _random_complex(rng, a, b, c)
    Hj = complex_cohomology_over_pid(d_prev, d_next, b, a, c)
    # H^{j+1} of the two-step complex C^b -> C^c -> 0 is coker(d_next)
    Hj1 = complex_cohomology_over_pid(d_next, [], c, b, 0)
    N = rng.randint(1, 4)
    brute = truncated_cohomology(d_prev, d_next, b, a, c, N)
    expected = Hj.free_rank * N + sum(min(x, N) * m for x, m in Hj.torsion) \
        + sum(min(x, N) * m for x, m in Hj1.torsion)
    assert brute.complex_dimension() == expected


# -- field linear algebra ----------------------------------------------------------

def test_rank_examples():
    I3 = [[GR(int(i == j)) for j in range(3)] for i in range(3)]
    assert rank(I3) == 3
    i = GR(0, 1)
    assert rank([[GR(1), i], [i, GR(-1)]]) == 1


def test_kernel_of_row():
    (v,) = kernel_basis([[GR(1), GR(1)]])
    assert v[0] == -v[1] and v[0]


def test_image_and_quotient():
    M = [[GR(1), GR(0)], [GR(0), GR(0)]]
    assert len(image_basis(M)) == 1
    U = [[GR(1), GR(0)], [GR(0), GR(1)]]
    W = [[GR(1), GR(0)]]
    assert subspace_quotient_dim(U, W, 2) == 1


@settings(max_examples=30)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4), st.randoms())
def test_rank_independent_of_row_order(rows, rnd):
    M = [[GR(x) for x in r] for r in rows]
    perm = list(M)
    rnd.shuffle(perm)
    assert rank(M) == rank(perm)


# -- integer alternating forms ----------------------------------------------------

def test_alternating_divisors():
    assert integer_alternating_divisors([[0, 1], [-1, 0]]) == [1]
    assert integer_alternating_divisors([[0, 2], [-2, 0]]) == [2]
    E = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 3], [0, 0, -3, 0]]
    assert integer_alternating_divisors(E) == [1, 3]


def test_alternating_divisors_errors():
    with pytest.raises(ValueError):
        integer_alternating_divisors([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        integer_alternating_divisors([[0]])


def test_module_dimensions():
    M = CohomologyModule.from_exponents(1, [2, 2, 3])
    assert M.dim_truncated(3) == 3 + 2 + 2 + 3
    assert M.complex_dimension() is None
    T = CohomologyModule.from_exponents(0, [2, 2, 3])
    assert T.complex_dimension() == 7
    assert str(T) == "(ℂ[ħ]/ħ^2)^2 ⊕ ℂ[ħ]/ħ^3"
    assert CohomologyModule.from_json(T.to_json()) == T
