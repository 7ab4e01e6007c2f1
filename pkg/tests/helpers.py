"""Shared random generators for the test modules."""
import random
from fractions import Fraction

from abelia.exactalg import GaussianRational as GR, HbarSeries, PiScalar
from abelia.moyal import AutomorphyFactor, ExpAffine, PoissonBivector


def random_exp_affine(rng, g, order, terms=2):
    f = ExpAffine.zero(g, order)
    for _ in range(terms):
        a = tuple(GR(rng.randint(-1, 1), rng.randint(-1, 1)) for _ in range(g))
        c = GR(Fraction(rng.randint(-2, 2), 2), Fraction(rng.randint(0, 3), 4))
        mono = tuple(rng.randint(0, 1) for _ in range(g))
        coeff = HbarSeries([PiScalar.pi_power(0, GR(rng.randint(-2, 2))) for _ in range(order)], order)
        f = f + ExpAffine(g, order, {(a, c): {mono: coeff}})
    return f


def random_poisson(rng, g):
    return PoissonBivector.from_upper(g, {(a, b): GR(rng.randint(-1, 1), rng.randint(-1, 1))
                                          for a in range(g) for b in range(a + 1, g)})


class CorruptedPhase(AutomorphyFactor):
    """Adds a phase that is not a semicharacter correction: 1/2 on elements with n_0 = 1 mod 3."""

    def exponent_data(self, n):
        lam, a, c = super().exponent_data(n)
        if n[0] % 3 == 1:
            c = c + GR(0, Fraction(1, 2))
        return lam, a, c
