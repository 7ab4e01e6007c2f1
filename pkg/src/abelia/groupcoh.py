"""Lattice group cochains with values in ExpAffine, differentials, cup products and
explicit cocycles.

Cochains are rules evaluated pointwise; every identity is checked on sampled
tuples of lattice elements (integer coefficient vectors).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .exactalg import GaussianRational, HbarSeries, PiScalar, ZERO
from .exterior import binom
from .moyal import AutomorphyFactor, ExpAffine, PoissonBivector, series_exponent
from .torus import QuantumAHData, degeneracy_subtorus, pairing, restrict_covector

Element = tuple  # integer coefficient vector of a lattice element


def add_elements(*ns: Element) -> Element:
    return tuple(sum(xs) for xs in zip(*ns))


def sample_elements(rng: random.Random, rank: int, count: int, bound: int = 3) -> list[Element]:
    return [tuple(rng.randint(-bound, bound) for _ in range(rank)) for _ in range(count)]


def sample_tuples(rng: random.Random, rank: int, length: int, count: int, bound: int = 3) -> list[tuple]:
    return [tuple(sample_elements(rng, rank, length, bound)) for _ in range(count)]


class LatticeCochain:
    """A p-cochain: a rule on p-tuples of lattice elements with ExpAffine values."""

    def __init__(self, degree: int, rule: Callable[..., ExpAffine], g: int, order: int,
                 tag: str = ""):
        self.degree = degree
        self.rule = rule
        self.g = g
        self.order = order
        self.tag = tag
        self._memo: dict = {}

    def __call__(self, *lams: Element) -> ExpAffine:
        if len(lams) != self.degree:
            raise TypeError(f"{self.degree}-cochain evaluated on {len(lams)} elements")
        key = tuple(tuple(x) for x in lams)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.rule(*key)
            self._memo[key] = hit
        return hit

    def __add__(self, other: "LatticeCochain") -> "LatticeCochain":
        if other.degree != self.degree:
            raise ValueError("adding cochains of different degree")
        return LatticeCochain(self.degree, lambda *l: self(*l) + other(*l), self.g,
                              min(self.order, other.order), "sum")

    def __neg__(self):
        return LatticeCochain(self.degree, lambda *l: -self(*l), self.g, self.order, self.tag)

    def __sub__(self, other):
        return self + (-other)

    def map_values(self, fn: Callable[[ExpAffine], ExpAffine], order: int | None = None,
                   tag: str | None = None) -> "LatticeCochain":
        return LatticeCochain(self.degree, lambda *l: fn(self(*l)), self.g,
                              self.order if order is None else order, self.tag if tag is None else tag)

    def is_zero_on(self, samples: Iterable[tuple]) -> bool:
        return all(self(*s).is_zero() for s in samples)


def constant_cochain(value: ExpAffine, degree: int = 0, tag: str = "constant") -> LatticeCochain:
    return LatticeCochain(degree, lambda *l: value, value.g, value.order, tag)


def phase_cochain(a: Sequence, lattice, g: int, order: int) -> LatticeCochain:
    """lam -> <a, lam>, constant in v."""
    return LatticeCochain(1, lambda n: ExpAffine.constant(pairing(a, lattice.vector(n)), g, order),
                          g, order, "multilinear-phase")


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

class TranslationAction:
    """lam . f = f o T_lam (the untwisted action)."""

    def __init__(self, lattice, order: int):
        self.lattice = lattice
        self.order = order
        self.g = lattice.g

    def act(self, n: Element, f: ExpAffine) -> ExpAffine:
        return f.translate(self.lattice.vector(n))


class TwistedAction:
    """A^Phi_lam(f) = (f o T_lam) star Phi_lam^{-1}."""

    def __init__(self, phi: AutomorphyFactor, order: int | None = None):
        self.phi = phi
        self.order = phi.order if order is None else order
        self.lattice = phi.data.lattice
        self.g = phi.g
        self.poisson = phi.poisson

    def act(self, n: Element, f: ExpAffine) -> ExpAffine:
        return f.translate(self.lattice.vector(n)).star(self.phi.inverse(n), self.poisson,
                                                         min(self.order, f.order))


def delta(f: LatticeCochain, action) -> LatticeCochain:
    """(d f)(l0..lp) = l0.f(l1..lp) + sum_i (-1)^{i+1} f(.., l_i + l_{i+1}, ..) + (-1)^{p+1} f(l0..l_{p-1})."""
    p = f.degree

    def rule(*lams):
        out = action.act(lams[0], f(*lams[1:]))
        for i in range(p):
            merged = lams[:i] + (add_elements(lams[i], lams[i + 1]),) + lams[i + 2:]
            term = f(*merged)
            out = out - term if i % 2 == 0 else out + term
        last = f(*lams[:p])
        out = out + last if (p + 1) % 2 == 0 else out - last
        return out

    return LatticeCochain(p + 1, rule, f.g, min(f.order, action.order), f"delta({f.tag})")


def commutative_pairing(x: ExpAffine, y: ExpAffine) -> ExpAffine:
    return x * y


def star_pairing(poisson: PoissonBivector) -> Callable[[ExpAffine, ExpAffine], ExpAffine]:
    return lambda x, y: x.star(y, poisson)


def cup(f: LatticeCochain, g: LatticeCochain, g_action,
        pairing_fn: Callable[[ExpAffine, ExpAffine], ExpAffine] = commutative_pairing) -> LatticeCochain:
    """(f u g)(l0..l_{p+q-1}) = f(l0..l_{p-1}) * ((l0 + .. + l_{p-1}) . g(l_p..l_{p+q-1}))."""
    p, q = f.degree, g.degree

    def rule(*lams):
        head = lams[:p]
        moved = g(*lams[p:])
        if p:
            moved = g_action.act(add_elements(*head), moved)
        return pairing_fn(f(*head), moved)

    return LatticeCochain(p + q, rule, f.g, min(f.order, g.order), f"cup({f.tag},{g.tag})")


def leibniz_holds(f: LatticeCochain, g: LatticeCochain, f_action, g_action, out_action,
                  samples: Iterable[tuple],
                  pairing_fn: Callable[[ExpAffine, ExpAffine], ExpAffine] = commutative_pairing) -> bool:
    """d(f u g) == d f u g + (-1)^p f u d g on the sampled (p+q+1)-tuples."""
    lhs = delta(cup(f, g, g_action, pairing_fn), out_action)
    df = cup(delta(f, f_action), g, g_action, pairing_fn)
    dg = cup(f, delta(g, g_action), g_action, pairing_fn)
    sign = -1 if f.degree % 2 else 1
    for s in samples:
        right = df(*s) + dg(*s) if sign > 0 else df(*s) - dg(*s)
        if not lhs(*s).equals(right):
            return False
    return True


def twisted_action_check(action, functions: Sequence[ExpAffine], pairs: Iterable[tuple]) -> bool:
    """A_{l1}(A_{l2}(f)) == A_{l1 + l2}(f) for every sampled f and pair."""
    for n1, n2 in pairs:
        for f in functions:
            left = action.act(n1, action.act(n2, f))
            right = action.act(add_elements(n1, n2), f)
            if not left.equals(right):
                return False
    return True


# ---------------------------------------------------------------------------
# the extension class of 0 -> L -> L -> L/hbar^t0 -> 0
# ---------------------------------------------------------------------------

class InfiniteOrder(ValueError):
    """Raised when t0 is infinite (l(hbar)^0 = 0)."""


def first_restricted_index(data: QuantumAHData, D=None) -> int | None:
    D = degeneracy_subtorus(data.H, data.lattice) if D is None else D
    for m in sorted(data.l_series):
        if any(restrict_covector(data.l_series[m], D)):
            return m
    return None


class ExtensionClass:
    """lam -> (f -> (f phi_lam) star (Phi_lam^{-1} - phi_lam^{-1}) / hbar^t0).

    Phi is built at order N + t0 so that values are exact modulo hbar^N.
    """

    def __init__(self, data: QuantumAHData, t0: int, order: int):
        if t0 is None:
            raise InfiniteOrder("extension class needs a finite t0")
        self.data = data
        self.t0 = t0
        self.order = order
        self.Phi = AutomorphyFactor(data, order + t0)
        self.phi = self.Phi.reduction(t0)
        self.poisson = self.Phi.poisson
        self._diff: dict = {}

    def difference(self, n: Element) -> ExpAffine:
        """(Phi_lam^{-1} - phi_lam^{-1}) / hbar^t0 at order N."""
        n = tuple(n)
        hit = self._diff.get(n)
        if hit is None:
            hit = (self.Phi.inverse(n) - self.phi.inverse(n)).divide_hbar(self.t0)
            self._diff[n] = hit
        return hit

    def apply(self, n: Element, f: ExpAffine) -> ExpAffine:
        N = self.order
        lifted = (f * self.phi(n)).truncate(N) if f.order >= N else None
        if lifted is None:
            raise ValueError("argument truncated below the class order")
        return lifted.star(self.difference(n), self.poisson, N)

    def on_one(self) -> LatticeCochain:
        """The degree-1 cochain lam -> a_lam(1)."""
        one = ExpAffine.one(self.data.g, self.order)
        return LatticeCochain(1, lambda n: self.apply(n, one), self.data.g, self.order, "extension-class(1)")

    def expected_reduction(self) -> LatticeCochain:
        """lam -> -pi <l_t0, lam>, constant in v, at order 1."""
        l = self.data.l(self.t0)
        lat = self.data.lattice
        g = self.data.g
        return LatticeCochain(
            1, lambda n: ExpAffine.constant(PiScalar.pi_power(1, -pairing(l, lat.vector(n))), g, 1),
            g, 1, "minus-pi-l_t0")

    def cup_formula(self, xi: LatticeCochain) -> LatticeCochain:
        """(xi_{l1..lj} o T_{l0}) star (Phi_{l0}^{-1} - phi_{l0}^{-1}) / hbar^t0."""
        lat = self.data.lattice

        def rule(*lams):
            moved = xi(*lams[1:]).translate(lat.vector(lams[0]))
            return moved.truncate(self.order).star(self.difference(lams[0]), self.poisson, self.order)

        return LatticeCochain(xi.degree + 1, rule, xi.g, self.order, f"alpha-cup({xi.tag})")

    def cup_operator(self, xi: LatticeCochain) -> LatticeCochain:
        """(a u xi)_{l0..lj} = a_{l0}(A^phi_{l0}(xi_{l1..lj})), evaluated with the operator form."""
        twisted_phi = TwistedAction(self.phi, self.order)

        def rule(*lams):
            return self.apply(lams[0], twisted_phi.act(lams[0], xi(*lams[1:])))

        return LatticeCochain(xi.degree + 1, rule, xi.g, self.order, f"alpha-op({xi.tag})")

    def via_differential(self, xi: LatticeCochain) -> LatticeCochain:
        """delta^Phi(xi) / hbar^t0, with xi lifted to order N + t0."""
        d = delta(xi, TwistedAction(self.Phi))
        return d.map_values(lambda x: x.divide_hbar(self.t0), order=self.order, tag=f"dPhi({xi.tag})/h^t0")


def extension_class_cochain(data: QuantumAHData, t0: int | None, order: int) -> ExtensionClass:
    return ExtensionClass(data, t0, order)


# ---------------------------------------------------------------------------
# explicit basis cocycles
# ---------------------------------------------------------------------------

class ScopeError(ValueError):
    pass


def complement_basis(l: Sequence, dim: int) -> list[tuple]:
    """Standard basis vectors completing span{l} (skip the first nonzero index of l)."""
    piv = next(i for i, x in enumerate(l) if x)
    return [tuple(GaussianRational(1) if k == i else ZERO for k in range(dim)) for i in range(dim) if i != piv]


@dataclass
class BasisCocycle:
    degree: int
    c: int                      # power of hbar in front
    index_set: tuple            # I, positions in the complement basis
    cochain: LatticeCochain | None
    expression: str
    verified_scope: bool


@dataclass
class CocycleListing:
    degree: int
    t0: int | None
    cocycles: list = field(default_factory=list)
    expected_count: int = 0
    warning: str = ""


def _basis_expression(c: int, I: tuple, j: int, k: int, t0: int, opaque_b: bool) -> str:
    pieces = []
    if c:
        pieces.append(f"ħ^{c}" if c > 1 else "ħ")
    if opaque_b:
        args = ", ".join(f"ρ(λ{i})" for i in range(1, k + 1))
        pieces.append(f"(b^r[{args}]∘ρ∘T_λ0)")
    for pos, i in enumerate(I):
        pieces.append(f"⟨a{i + 1}, λ{k + 1 + pos}⟩")
    pieces.append(f"φ_λ0^-1·(exp(-Σ_{{m≥{t0}}} ħ^m π⟨l_m, λ0⟩) - 1)/ħ^{t0}")
    return " · ".join(pieces)


def build_basis_cocycles(data: QuantumAHData, j: int, order: int, *,
                         require_verified: bool = False) -> CocycleListing:
    """Closed-form cocycles whose classes form a basis of H^j, in the scope H = 0.

    For H != 0 the classical factor b^r is a theta-type cocycle with no exact
    symbolic form here; the listing is then emitted with opaque b^r symbols and
    a warning, and no cochains are attached.
    """
    D = degeneracy_subtorus(data.H, data.lattice)
    t0 = first_restricted_index(data, D)
    g = data.g
    listing = CocycleListing(degree=j, t0=t0)
    if t0 is None:
        listing.warning = "t0 is infinite: no extension-class cocycles"
        return listing
    h_is_zero = data.H.is_zero()
    chi_trivial = all(r == 0 for r in data.chi.phases)
    if not h_is_zero or not chi_trivial:
        if require_verified:
            raise ScopeError("verified cocycles need H = 0 and trivial chi")
        k = D.k
        listing.warning = ("emit-only: H != 0, classical factors b^r are opaque symbols"
                           if not h_is_zero else "emit-only: chi is nontrivial")
        if not chi_trivial and h_is_zero:
            return listing
        g0 = D.g0
        lt = restrict_covector(data.l(t0), D)
        comp = complement_basis(lt, g0)
        hb = D.hbar_bar
        listing.expected_count = t0 * binom(g0 - 1, j - k - 1) * hb
        for r in range(hb):
            for I in combinations(range(len(comp)), j - k - 1) if j - k - 1 >= 0 else []:
                for c in range(t0):
                    listing.cocycles.append(BasisCocycle(j, c, I, None,
                                                         _basis_expression(c, I, j, k, t0, True), False))
        return listing

    lt = data.l(t0)
    comp = complement_basis(lt, g)
    listing.expected_count = t0 * binom(g - 1, j - 1)
    if j < 1:
        return listing
    lat = data.lattice
    Phi = AutomorphyFactor(data, order + t0)
    phi = Phi.reduction(t0)

    def e_factor(n):
        lam = lat.vector(n)
        tail = (-series_exponent(data, lam, order + t0, lo=t0)).exp() - HbarSeries.one(order + t0)
        return phi.inverse(n).scale(tail.divide_hbar(t0))

    for I in combinations(range(len(comp)), j - 1):
        for c in range(t0):
            def rule(*lams, I=I, c=c):
                val = e_factor(lams[0])
                for pos, i in enumerate(I):
                    val = val.scale(pairing(comp[i], lat.vector(lams[1 + pos])))
                return val.shift_hbar(c) if c else val
            cochain = LatticeCochain(j, rule, g, order, "explicit-basis-cocycle")
            listing.cocycles.append(BasisCocycle(j, c, I, cochain,
                                                 _basis_expression(c, I, j, 0, t0, False), True))
    return listing


def cocycle_residuals(data: QuantumAHData, listing: CocycleListing, order: int,
                      samples: Sequence[tuple]) -> list[bool]:
    """For each verified cocycle: delta^Phi vanishes mod hbar^order on every sample."""
    action = TwistedAction(AutomorphyFactor(data, order))
    out = []
    for bc in listing.cocycles:
        if bc.cochain is None:
            out.append(False)
            continue
        d = delta(bc.cochain, action)
        out.append(all(d(*s).is_zero() for s in samples))
    return out
