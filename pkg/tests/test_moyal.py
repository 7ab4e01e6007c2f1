import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abelia.exactalg import GaussianRational as GR, HbarSeries, PiScalar, ZERO
from abelia.groupcoh import sample_elements
from abelia.mainthm import FixtureSpec, random_data
from abelia.moyal import (
    AutomorphyFactor,
    ExpAffine,
    IncompatibleData,
    PoissonBivector,
    build_phi,
    check_cocycle,
    classical_factor,
    compatibility,
    poisson_bracket,
)
from abelia.torus import HermitianNS, pairing

from helpers import CorruptedPhase, random_exp_affine, random_poisson

P12 = PoissonBivector.from_upper(2, {(0, 1): 1})


def hbar(order, g=2, k=1, c=1):
    return ExpAffine.constant(HbarSeries.monomial(k, c, order), g, order)


def test_compatibility_examples():
    assert compatibility(HermitianNS.zero(2), P12)
    H = HermitianNS([[1, 0], [0, 0]])
    assert compatibility(H, P12)
    assert not compatibility(HermitianNS([[1, 0], [0, 1]]), P12)


def test_coordinate_star_products():
    v1 = ExpAffine.coordinate(0, 2, 3)
    v2 = ExpAffine.coordinate(1, 2, 3)
    assert v1.star(v2, P12) == v1 * v2 + hbar(3)
    assert v2.star(v1, P12) == v1 * v2 - hbar(3)


def test_exponential_star_product():
    N = 4
    e1 = ExpAffine.exponential((GR(1), ZERO), 0, 2, N)
    e2 = ExpAffine.exponential((ZERO, GR(1)), 0, 2, N)
    # exp(pi v1) * exp(pi v2) = exp(hbar pi^2) exp(pi (v1 + v2))
    expected = ExpAffine.exponential((GR(1), GR(1)), 0, 2, N,
                                     coeff=HbarSeries.monomial(1, PiScalar.pi_power(2), N).exp())
    assert e1.star(e2, P12) == expected


def test_zero_bivector_gives_pointwise_product():
    rng = random.Random(3)
    f, g = random_exp_affine(rng, 2, 3), random_exp_affine(rng, 2, 3)
    assert f.star(g, PoissonBivector.zero(2)) == f * g


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_unit_and_associativity(seed):
    rng = random.Random(seed)
    g = rng.randint(1, 3)
    N = rng.randint(1, 5)
    Pi = random_poisson(rng, g)
    f, h, k = (random_exp_affine(rng, g, N) for _ in range(3))
    one = ExpAffine.one(g, N)
    assert f.star(one, Pi) == f and one.star(f, Pi) == f
    assert f.star(h, Pi).star(k, Pi) == f.star(h.star(k, Pi), Pi)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_commutator_linear_term_is_twice_the_bracket(seed):
    rng = random.Random(seed)
    g = rng.randint(2, 3)
    Pi = random_poisson(rng, g)
    f, h = random_exp_affine(rng, g, 2), random_exp_affine(rng, g, 2)
    comm = f.star(h, Pi) - h.star(f, Pi)
    bracket = poisson_bracket(f.truncate(1), h.truncate(1), Pi)
    # [f, h] = 2 hbar {f, h} + O(hbar^2); compare the hbar^1 coefficient
    assert comm.truncate(1).is_zero()
    assert comm.divide_hbar(1) == bracket.scale(GR(2))


def test_star_inverse_of_exponential():
    rng = random.Random(0)
    Pi = random_poisson(rng, 3)
    S = HbarSeries.monomial(1, PiScalar.pi_power(1, GR(2, 1)), 4).exp()
    f = ExpAffine.exponential((GR(1), GR(0, 1), GR(-2)), GR(1, Fraction(1, 3)), 3, 4, coeff=S)
    assert f.star(f.star_inverse(), Pi) == ExpAffine.one(3, 4)


def test_build_phi_trivial_data():
    data = random_data(random.Random(1), FixtureSpec(2, 2, 0, 1, 1), scramble=False)
    Phi = build_phi(data, (1, 0, 0, 0), 3)
    lam = data.lattice.vector((1, 0, 0, 0))
    l1 = data.l(1)
    # H = 0, chi = 1: Phi = exp(hbar pi <l_1, lam>)
    expected = ExpAffine.constant(HbarSeries.monomial(1, PiScalar.pi_power(1, pairing(l1, lam)), 3).exp(), 2, 3)
    assert Phi == expected
    assert build_phi(data, (0, 0, 0, 0), 3) == ExpAffine.one(2, 3)


def test_classical_reduction_matches_assembled_factor():
    rng = random.Random(7)
    data = random_data(rng, FixtureSpec(3, 1, 1, 2, 1))
    phi = AutomorphyFactor(data, 3).classical()
    for n in sample_elements(rng, 6, 10, 2):
        assert phi(n).truncate(1) == classical_factor(data, n, 1)


def test_incompatible_bivector_is_refused():
    data = random_data(random.Random(2), FixtureSpec(2, 0, 0, 1, float("inf")), scramble=False)
    bad = type(data)(data.lattice, data.ah, {}, [[0, 1], [-1, 0]])
    with pytest.raises(IncompatibleData):
        AutomorphyFactor(bad, 2)


@pytest.mark.parametrize("spec", [FixtureSpec(2, 1, 0, 2, 1), FixtureSpec(3, 2, 1, 1, 2),
                                  FixtureSpec(2, 2, 0, 1, 1), FixtureSpec(3, 1, 0, 3, 2)])
def test_cocycle_identity(spec):
    rng = random.Random(str(spec))
    data = random_data(rng, spec)
    phi = AutomorphyFactor(data, 3)
    for _ in range(50):
        n1, n2 = sample_elements(rng, 2 * data.g, 2, 2)
        assert check_cocycle(phi, n1, n2)


def test_corrupted_phase_breaks_the_cocycle():
    data = random_data(random.Random(5), FixtureSpec(2, 1, 0, 1, 1))
    phi = CorruptedPhase(data, 2)
    # two corrupted factors multiply to -1 while their sum (n_0 = 2) is untouched
    assert not check_cocycle(phi, (1, 0, 0, 0), (1, 0, 0, 0))
    assert check_cocycle(AutomorphyFactor(data, 2), (1, 0, 0, 0), (1, 0, 0, 0))


def test_reduction_drops_high_terms():
    data = random_data(random.Random(4), FixtureSpec(2, 1, 0, 1, 2, t=1))
    Phi = AutomorphyFactor(data, 4)
    n = (1, 1, 0, 1)
    assert Phi.reduction(2)(n).equals(Phi(n), 2)
    assert not Phi.reduction(1)(n).equals(Phi(n), 2)
