"""Moyal star products on exponential-polynomial functions, and deformed factors of automorphy.

An ``ExpAffine`` is a finite sum

    sum_K  p_K(v) * exp(pi * (c_K + a_K . v))

where each p_K is a polynomial in v_1..v_g whose coefficients are truncated
hbar-series over Q(i)[pi].  The key K = (a_K, c_K) is kept in a normal form:
exp(i pi / 2) = i is folded into the coefficients, so Im c_K lies in [0, 1/2).
Distinct normal keys are treated as independent exponentials (see the README
for the limits of this equality test).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .exactalg import GaussianRational, HbarSeries, I, ONE, PiScalar, ZERO, as_gr
from .exactalg.linalg import matmul, transpose
from .torus import QuantumAHData, pairing

Mono = tuple  # exponent vector


class IncompatibleData(ValueError):
    pass


class TruncationMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Poisson bivector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonBivector:
    matrix: tuple

    def __post_init__(self):
        M = tuple(tuple(as_gr(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        n = len(M)
        for a in range(n):
            for b in range(n):
                if M[a][b] != -M[b][a]:
                    raise ValueError("Poisson bivector must be antisymmetric")

    @classmethod
    def zero(cls, g: int) -> "PoissonBivector":
        return cls(tuple(tuple(ZERO for _ in range(g)) for _ in range(g)))

    @classmethod
    def from_upper(cls, g: int, entries: Mapping[tuple, object]) -> "PoissonBivector":
        """Build from {(a, b): value} with a < b (0-based)."""
        M = [[ZERO] * g for _ in range(g)]
        for (a, b), x in entries.items():
            x = as_gr(x)
            M[a][b] = x
            M[b][a] = -x
        return cls(tuple(tuple(r) for r in M))

    @property
    def g(self) -> int:
        return len(self.matrix)

    @property
    def entries(self) -> tuple:
        """Nonzero (a, b, Pi^{ab})."""
        return tuple((a, b, x) for a, row in enumerate(self.matrix) for b, x in enumerate(row) if x)

    def pair(self, u: Sequence, w: Sequence) -> GaussianRational:
        acc = ZERO
        for a, b, x in self.entries:
            if u[a] and w[b]:
                acc = acc + u[a] * x * w[b]
        return acc

    def is_zero(self) -> bool:
        return not self.entries


def compatibility(H, poisson: PoissonBivector) -> bool:
    """True iff H^T Pi H = 0, the contraction of H ^ H with Pi."""
    M = H.matrix if hasattr(H, "matrix") else H
    M = [list(r) for r in M]
    P = [list(r) for r in poisson.matrix]
    if len(M) != len(P):
        raise ValueError("H and Pi have different sizes")
    prod = matmul(matmul(transpose(M), P), M)
    return not any(x for row in prod for x in row)


# ---------------------------------------------------------------------------
# the function algebra
# ---------------------------------------------------------------------------

_QUARTER_TURNS = (ONE, I, -ONE, -I)


def _normal_key(a: tuple, c: GaussianRational):
    """Normal form of exp(pi (c + a.v)): returns (key, unit) with unit in {1, i, -1, -i}."""
    y = c.im
    q = (2 * y).__floor__()      # exp(i pi q / 2) = i^q
    if q:
        c = c - GaussianRational(0, Fraction(q, 2))
    return (a, c), _QUARTER_TURNS[q % 4]


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    return tuple(x + y for x, y in zip(m1, m2))


def _add_into(poly: dict, mono: Mono, s: HbarSeries) -> None:
    cur = poly.get(mono)
    if cur is None:
        if s:
            poly[mono] = s
    else:
        t = cur + s
        if t:
            poly[mono] = t
        else:
            del poly[mono]


class ExpAffine:
    __slots__ = ("g", "order", "terms")

    def __init__(self, g: int, order: int, terms: Mapping | None = None):
        self.g = g
        self.order = order
        clean: dict = {}
        for (a, c), poly in (terms or {}).items():
            a = tuple(as_gr(x) for x in a)
            if len(a) != g:
                raise ValueError("exponent has the wrong length")
            key, unit = _normal_key(a, as_gr(c))
            dest = clean.setdefault(key, {})
            for mono, s in poly.items():
                mono = tuple(mono)
                if not isinstance(s, HbarSeries):
                    s = HbarSeries.constant(s if isinstance(s, PiScalar) else as_gr(s), order)
                elif s.order < order:
                    raise TruncationMismatch("coefficient series shorter than the element's order")
                else:
                    s = s.truncate(order)
                _add_into(dest, mono, s * unit if unit != ONE else s)
            if not dest:
                del clean[key]
        self.terms = clean

    @classmethod
    def _wrap(cls, g: int, order: int, terms: dict) -> "ExpAffine":
        obj = object.__new__(cls)
        obj.g = g
        obj.order = order
        obj.terms = terms
        return obj

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, g: int, order: int) -> "ExpAffine":
        return cls._wrap(g, order, {})

    @classmethod
    def constant(cls, c, g: int, order: int) -> "ExpAffine":
        return cls.exponential((ZERO,) * g, ZERO, g, order, coeff=c)

    @classmethod
    def one(cls, g: int, order: int) -> "ExpAffine":
        return cls.constant(1, g, order)

    @classmethod
    def coordinate(cls, i: int, g: int, order: int) -> "ExpAffine":
        mono = tuple(1 if k == i else 0 for k in range(g))
        return cls(g, order, {((ZERO,) * g, ZERO): {mono: 1}})

    @classmethod
    def exponential(cls, a: Sequence, c, g: int, order: int, coeff=1) -> "ExpAffine":
        """coeff * exp(pi (c + a.v)); coeff may be a scalar, PiScalar or HbarSeries."""
        return cls(g, order, {(tuple(a), as_gr(c)): {(0,) * g: coeff}})

    @classmethod
    def polynomial(cls, coeffs: Mapping[tuple, object], g: int, order: int) -> "ExpAffine":
        return cls(g, order, {((ZERO,) * g, ZERO): dict(coeffs)})

    # -- basic structure ---------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, ExpAffine):
            return NotImplemented
        return self.g == other.g and self.order == other.order and self.terms == other.terms

    def __hash__(self):
        return hash((self.g, self.order, len(self.terms)))

    def equals(self, other: "ExpAffine", order: int | None = None) -> bool:
        n = min(self.order, other.order) if order is None else order
        return self.truncate(n) == other.truncate(n)

    def truncate(self, order: int) -> "ExpAffine":
        if order == self.order:
            return self
        if order > self.order:
            raise TruncationMismatch(f"cannot raise truncation {self.order} -> {order}")
        out = {}
        for key, poly in self.terms.items():
            new = {m: s.truncate(order) for m, s in poly.items()}
            new = {m: s for m, s in new.items() if s}
            if new:
                out[key] = new
        return ExpAffine._wrap(self.g, order, out)

    def _check(self, other: "ExpAffine"):
        if self.g != other.g:
            raise ValueError("functions on different spaces")

    def __add__(self, other: "ExpAffine") -> "ExpAffine":
        self._check(other)
        n = min(self.order, other.order)
        a = self.truncate(n)
        b = other.truncate(n)
        out = {k: dict(p) for k, p in a.terms.items()}
        for key, poly in b.terms.items():
            dest = out.setdefault(key, {})
            for m, s in poly.items():
                _add_into(dest, m, s)
            if not dest:
                del out[key]
        return ExpAffine._wrap(self.g, n, out)

    def __neg__(self):
        return ExpAffine._wrap(self.g, self.order,
                               {k: {m: -s for m, s in p.items()} for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExpAffine":
        """Multiply by a scalar, PiScalar or HbarSeries constant."""
        if isinstance(c, HbarSeries):
            n = min(self.order, c.order)
            src = self.truncate(n)
            c = c.truncate(n)
        else:
            src = self
            c = c if isinstance(c, PiScalar) else as_gr(c)
        out = {}
        for key, poly in src.terms.items():
            new = {}
            for m, s in poly.items():
                t = s * c
                if t:
                    new[m] = t
            if new:
                out[key] = new
        return ExpAffine._wrap(self.g, src.order, out)

    def __mul__(self, other):
        """Commutative (pointwise) product."""
        if not isinstance(other, ExpAffine):
            return self.scale(other)
        self._check(other)
        n = min(self.order, other.order)
        out: dict = {}
        for (a1, c1), p1 in self.terms.items():
            for (a2, c2), p2 in other.terms.items():
                key, unit = _normal_key(tuple(x + y for x, y in zip(a1, a2)), c1 + c2)
                dest = out.setdefault(key, {})
                for m1, s1 in p1.items():
                    for m2, s2 in p2.items():
                        s = s1 * s2
                        if unit != ONE:
                            s = s * unit
                        _add_into(dest, _mono_mul(m1, m2), s)
                if not dest:
                    del out[key]
        return ExpAffine._wrap(self.g, n, out)

    __rmul__ = __mul__

    def shift_hbar(self, k: int) -> "ExpAffine":
        """Multiply by hbar^k at the same truncation order."""
        out = {}
        for key, poly in self.terms.items():
            new = {m: s.shift(k) for m, s in poly.items()}
            new = {m: s for m, s in new.items() if s}
            if new:
                out[key] = new
        return ExpAffine._wrap(self.g, self.order, out)

    def divide_hbar(self, k: int) -> "ExpAffine":
        """Exact division by hbar^k (raises ArithmeticError if not divisible)."""
        out = {}
        for key, poly in self.terms.items():
            new = {}
            for m, s in poly.items():
                t = s.divide_hbar(k)
                if t:
                    new[m] = t
            if new:
                out[key] = new
        return ExpAffine._wrap(self.g, self.order - k, out)

    def valuation(self) -> int | None:
        vals = [s.valuation() for p in self.terms.values() for s in p.values()]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def is_constant_in_v(self) -> bool:
        zero_a = (ZERO,) * self.g
        return all(a == zero_a and all(not any(m) for m in p) for (a, _), p in self.terms.items())

    # -- translation ---------------------------------------------------------------
    def translate(self, lam: Sequence) -> "ExpAffine":
        """(f o T_lam)(v) = f(v + lam) for a vector lam of V."""
        lam = tuple(as_gr(x) for x in lam)
        out: dict = {}
        for (a, c), poly in self.terms.items():
            shift = sum((x * y for x, y in zip(a, lam) if x and y), ZERO)
            key, unit = _normal_key(a, c + shift)
            dest = out.setdefault(key, {})
            for mono, s in poly.items():
                if unit != ONE:
                    s = s * unit
                for new_mono, coef in _expand_shift(mono, lam):
                    _add_into(dest, new_mono, s * coef)
            if not dest:
                del out[key]
        return ExpAffine._wrap(self.g, self.order, out)

    # -- the star product ------------------------------------------------------------
    def star(self, other: "ExpAffine", poisson: PoissonBivector, order: int | None = None) -> "ExpAffine":
        self._check(other)
        n = min(self.order, other.order)
        if order is not None:
            if order > n:
                raise TruncationMismatch(f"star at order {order} needs inputs of at least that order")
            n = order
        entries = poisson.entries
        out: dict = {}
        for (a1, c1), p1 in self.terms.items():
            for (a2, c2), p2 in other.terms.items():
                key, unit = _normal_key(tuple(x + y for x, y in zip(a1, a2)), c1 + c2)
                dest = out.setdefault(key, {})
                state = {}
                for m1, s1 in p1.items():
                    for m2, s2 in p2.items():
                        s = s1.truncate(n) * s2.truncate(n)
                        if s:
                            state[(m1, m2)] = s
                k = 0
                while state:
                    for (m1, m2), s in state.items():
                        t = _raised(s, k, n) if k else s
                        if unit != ONE:
                            t = t * unit
                        _add_into(dest, _mono_mul(m1, m2), t)
                    k += 1
                    if k >= n or not entries:
                        break
                    state = _apply_bidifferential(state, entries, a1, a2, k, n - k)
                if not dest:
                    del out[key]
        return ExpAffine._wrap(self.g, n, out)

    def star_inverse(self) -> "ExpAffine":
        """Inverse for the star product of s * exp(pi (c + a.v)) with s a unit series.

        exp(pi a.v) star exp(-pi a.v) = exp(hbar pi^2 Pi(a, -a)) = 1, so the inverse
        does not depend on the bivector.
        """
        if len(self.terms) != 1:
            raise ArithmeticError("star inverse only implemented for a single exponential term")
        (a, c), poly = next(iter(self.terms.items()))
        if set(poly) != {(0,) * self.g}:
            raise ArithmeticError("star inverse needs a trivial polynomial part")
        s = poly[(0,) * self.g]
        return ExpAffine(self.g, self.order, {(tuple(-x for x in a), -c): {(0,) * self.g: s.inverse()}})

    # -- display -----------------------------------------------------------------------
    def __repr__(self):
        return f"ExpAffine({self})"

    def __str__(self):
        if not self.terms:
            return f"0 + O(ħ^{self.order})"
        parts = []
        for (a, c), poly in sorted(self.terms.items(), key=lambda kv: str(kv[0])):
            ptxt = " + ".join(f"{s}·v^{m}" if any(m) else f"{s}" for m, s in poly.items())
            if any(a) or c:
                lin = " + ".join(f"({x})v{i + 1}" for i, x in enumerate(a) if x)
                expo = " + ".join(t for t in (f"{c}" if c else "", lin) if t)
                parts.append(f"({ptxt})·exp(π({expo}))")
            else:
                parts.append(f"({ptxt})")
        return " + ".join(parts)


def _raised(s: HbarSeries, k: int, order: int) -> HbarSeries:
    """hbar^k * s as a series of the given order (s needs order >= order - k)."""
    return HbarSeries([PiScalar()] * k + list(s.terms[:order - k]), order)


def _expand_shift(mono: Mono, lam: tuple):
    """Monomials and coefficients of prod_i (v_i + lam_i)^{e_i}."""
    out = [((), ONE)]
    for e, l in zip(mono, lam):
        new = []
        for partial, coef in out:
            for k in range(e + 1):
                if k < e and not l:
                    continue
                c = coef * comb(e, k) * (l ** (e - k) if e - k else ONE)
                new.append((partial + (k,), c))
        out = new
    return out


def _apply_bidifferential(state: dict, entries, a1, a2, k: int, order: int) -> dict:
    """One application of P / k, P = sum Pi^{ab} D1_a D2_b with D_i = d/dv_i + pi a_i."""
    inv_k = GaussianRational(Fraction(1, k))
    new: dict = {}
    for (m1, m2), s in state.items():
        s = s.truncate(order) if s.order > order else s
        # scalar weight of each target monomial pair, summed before touching the series
        weights: dict = {}
        for a, b, x in entries:
            left = []
            if m1[a]:
                left.append((m1[:a] + (m1[a] - 1,) + m1[a + 1:], GaussianRational(m1[a]), 0))
            if a1[a]:
                left.append((m1, a1[a], 1))
            if not left:
                continue
            right = []
            if m2[b]:
                right.append((m2[:b] + (m2[b] - 1,) + m2[b + 1:], GaussianRational(m2[b]), 0))
            if a2[b]:
                right.append((m2, a2[b], 1))
            for n1, u1, e1 in left:
                for n2, u2, e2 in right:
                    coef = PiScalar.pi_power(e1 + e2, x * u1 * u2 * inv_k)
                    cur = weights.get((n1, n2))
                    weights[(n1, n2)] = coef if cur is None else cur + coef
        for key, coef in weights.items():
            if not coef:
                continue
            t = s * coef
            cur = new.get(key)
            new[key] = t if cur is None else cur + t
    return {key: s for key, s in new.items() if s}


def poisson_bracket(f: ExpAffine, g: ExpAffine, poisson: PoissonBivector) -> ExpAffine:
    """{f, g} = sum Pi^{ab} d_a f d_b g."""
    out = ExpAffine.zero(f.g, min(f.order, g.order))
    for a, b, x in poisson.entries:
        out = out + (derivative(f, a) * derivative(g, b)).scale(x)
    return out


def derivative(f: ExpAffine, i: int) -> ExpAffine:
    out: dict = {}
    for (a, c), poly in f.terms.items():
        dest: dict = {}
        for m, s in poly.items():
            if m[i]:
                _add_into(dest, m[:i] + (m[i] - 1,) + m[i + 1:], s * GaussianRational(m[i]))
            if a[i]:
                _add_into(dest, m, s * PiScalar.pi_power(1, a[i]))
        if dest:
            out[(a, c)] = dest
    return ExpAffine._wrap(f.g, f.order, out)


# ---------------------------------------------------------------------------
# factors of automorphy
# ---------------------------------------------------------------------------

def series_exponent(data: QuantumAHData, lam: Sequence, order: int, lo: int = 1,
                    hi: int | None = None) -> HbarSeries:
    """sum_{lo <= m < hi} hbar^m pi <l_m, lam>, truncated at hbar^order."""
    terms = [PiScalar()] * order
    for m, l in data.l_series.items():
        if m < lo or (hi is not None and m >= hi) or m >= order:
            continue
        terms[m] = PiScalar.pi_power(1, pairing(l, lam))
    return HbarSeries(terms, order)


class AutomorphyFactor:
    """lam -> Phi_lam = chi(lam) exp(pi H(v, lam) + pi/2 H(lam, lam) + sum_m hbar^m pi <l_m, lam>).

    Lattice elements are integer coefficient vectors.  ``cutoff`` keeps only
    the series terms with m < cutoff; this is the exponential lift of the
    reduction of Phi modulo hbar^cutoff.
    """

    def __init__(self, data: QuantumAHData, order: int, cutoff: int | None = None,
                 check: bool = True):
        self.data = data
        self.order = order
        self.cutoff = cutoff
        self.g = data.g
        self.poisson = PoissonBivector(data.poisson)
        if check and not compatibility(data.H, self.poisson):
            raise IncompatibleData("H^T Pi H != 0: Poisson bivector is not compatible with H")
        self.E = data.E()
        self._cache: dict = {}
        self._inv_cache: dict = {}

    def reduction(self, s: int) -> "AutomorphyFactor":
        """phi = Phi mod hbar^s, lifted by dropping l_m for m >= s."""
        cut = s if self.cutoff is None else min(s, self.cutoff)
        return AutomorphyFactor(self.data, self.order, cut, check=False)

    def classical(self) -> "AutomorphyFactor":
        return self.reduction(1)

    def vector(self, n: Sequence[int]) -> tuple:
        return self.data.lattice.vector(n)

    def exponent_data(self, n: Sequence[int]):
        """(a, c): Phi_n = S * exp(pi (c + a.v)) with S the hbar-series factor."""
        lam = self.vector(n)
        a = self.data.H.gradient(lam)
        c = GaussianRational(self.data.H(lam, lam).re / 2, self.data.chi.phase(n, self.E))
        return lam, a, c

    def __call__(self, n: Sequence[int]) -> ExpAffine:
        n = tuple(n)
        hit = self._cache.get(n)
        if hit is not None:
            return hit
        lam, a, c = self.exponent_data(n)
        S = series_exponent(self.data, lam, self.order, hi=self.cutoff).exp()
        out = ExpAffine.exponential(a, c, self.g, self.order, coeff=S)
        self._cache[n] = out
        return out

    def inverse(self, n: Sequence[int]) -> ExpAffine:
        n = tuple(n)
        hit = self._inv_cache.get(n)
        if hit is None:
            hit = self(n).star_inverse()
            self._inv_cache[n] = hit
        return hit


def build_phi(data: QuantumAHData, n: Sequence[int], order: int) -> ExpAffine:
    return AutomorphyFactor(data, order)(n)


def classical_factor(data: QuantumAHData, n: Sequence[int], order: int = 1) -> ExpAffine:
    """chi(lam) exp(pi H(v, lam) + pi/2 H(lam, lam)), assembled term by term."""
    lam = data.lattice.vector(n)
    g = data.g
    lin = ExpAffine.exponential(data.H.gradient(lam), 0, g, order)
    quad = ExpAffine.exponential((ZERO,) * g, data.H(lam, lam) / 2, g, order)
    chi = ExpAffine.exponential((ZERO,) * g, GaussianRational(0, data.chi.phase(n, data.E())), g, order)
    return lin * quad * chi


def check_cocycle(phi: AutomorphyFactor, n1: Sequence[int], n2: Sequence[int],
                  order: int | None = None) -> bool:
    """Phi_{l2} star (Phi_{l1} o T_{l2}) == Phi_{l1 + l2}."""
    N = phi.order if order is None else order
    lam2 = phi.vector(n2)
    lhs = phi(n2).star(phi(n1).translate(lam2), phi.poisson, N)
    rhs = phi(tuple(x + y for x, y in zip(n1, n2))).truncate(N)
    return lhs == rhs
