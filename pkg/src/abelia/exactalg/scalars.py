"""Exact scalars: Gaussian rationals, polynomials in a formal pi, truncated hbar-series.

Nothing in this module ever produces a float.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

__all__ = [
    "GaussianRational",
    "GR",
    "ZERO",
    "ONE",
    "I",
    "PiScalar",
    "HbarSeries",
    "as_gr",
]


class GaussianRational:
    """An element (a + b i) / d of Q(i), stored with a common positive denominator.

    The triple is kept reduced (gcd(a, b, d) == 1, d > 0) so structural equality
    is value equality.  ``re`` and ``im`` return reduced Fractions.
    """

    __slots__ = ("_a", "_b", "_d", "_hash")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(a, b, d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self._a = a
        self._b = b
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = object.__new__(cls)
        obj._set(a, b, d)
        return obj

    # -- accessors -----------------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """|z|^2, a nonnegative rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def is_real(self) -> bool:
        return self._b == 0

    def is_integer(self) -> bool:
        return self._d == 1 and self._b == 0

    def is_gaussian_integer(self) -> bool:
        return self._d == 1

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        a, b, d = self._a, self._b, self._d
        c, e, f = other._a, other._b, other._d
        if d == f:
            return GaussianRational._raw(a + c, b + e, d)
        return GaussianRational._raw(a * f + c * d, b * f + e * d, d * f)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, int):
                return GaussianRational._raw(self._a * other, self._b * other, self._d)
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        a, b, d = self._a, self._b, self._d
        c, e, f = other._a, other._b, other._d
        return GaussianRational._raw(a * c - b * e, a * e + b * c, d * f)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianRational._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_gr(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons -------------------------------------------------------------
    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self._b == 0:
                self._hash = hash(Fraction(self._a, self._d))
            else:
                self._hash = hash((self._a, self._b, self._d))
        return self._hash

    def __repr__(self):
        return f"GR({self})"

    def __str__(self):
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if re == 0:
            return f"{im}i" if im != 1 else "i"
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        return f"{re}{sign}{mag if mag != 1 else ''}i"

    def to_json(self) -> list:
        return [str(self.re), str(self.im)]


GR = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def as_gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact; pass GaussianRational")
    if isinstance(x, str):
        return GaussianRational(Fraction(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


# ---------------------------------------------------------------------------
# polynomials in a formal transcendental pi
# ---------------------------------------------------------------------------

class PiScalar:
    """A polynomial in the formal symbol pi with Q(i) coefficients.

    ``coefficients[e]`` multiplies pi**e.  Trailing zeros are stripped, so the
    empty tuple is zero.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [as_gr(c) for c in coefficients]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @classmethod
    def _wrap(cls, coeffs: list) -> "PiScalar":
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        obj = object.__new__(cls)
        obj.coefficients = tuple(coeffs)
        return obj

    @classmethod
    def constant(cls, c) -> "PiScalar":
        return cls._wrap([as_gr(c)])

    @classmethod
    def pi_power(cls, e: int, c=1) -> "PiScalar":
        return cls._wrap([ZERO] * e + [as_gr(c)])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __bool__(self):
        return bool(self.coefficients)

    def __eq__(self, other):
        if isinstance(other, PiScalar):
            return self.coefficients == other.coefficients
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == PiScalar.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def __add__(self, other):
        if not isinstance(other, PiScalar):
            other = PiScalar.constant(other)
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return PiScalar._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return PiScalar._wrap([-c for c in self.coefficients])

    def __sub__(self, other):
        if not isinstance(other, PiScalar):
            other = PiScalar.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiScalar):
            a, b = self.coefficients, other.coefficients
            if not a or not b:
                return PiScalar._wrap([])
            out = [ZERO] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if not x:
                    continue
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
            return PiScalar._wrap(out)
        c = as_gr(other)
        if not c:
            return PiScalar._wrap([])
        return PiScalar._wrap([x * c for x in self.coefficients])

    __rmul__ = __mul__

    def times_pi(self, e: int = 1) -> "PiScalar":
        if not self.coefficients:
            return self
        return PiScalar._wrap([ZERO] * e + list(self.coefficients))

    def constant_term(self) -> GaussianRational:
        return self.coefficients[0] if self.coefficients else ZERO

    def __repr__(self):
        return f"PiScalar({self})"

    def __str__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for e, c in enumerate(self.coefficients):
            if not c:
                continue
            if e == 0:
                parts.append(f"({c})")
            elif e == 1:
                parts.append(f"({c})π")
            else:
                parts.append(f"({c})π^{e}")
        return " + ".join(parts)


_PI_ZERO = PiScalar()
_PI_ONE = PiScalar.constant(1)


# ---------------------------------------------------------------------------
# truncated power series in hbar
# ---------------------------------------------------------------------------

class HbarSeries:
    """A power series in hbar truncated at hbar**order, coefficients in PiScalar.

    Binary operations between series of different order truncate to the smaller
    order; everything below the truncation is exact.
    """

    __slots__ = ("order", "terms")

    def __init__(self, terms: Sequence = (), order: int | None = None):
        terms = [t if isinstance(t, PiScalar) else PiScalar.constant(t) for t in terms]
        if order is None:
            order = len(terms)
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        terms = terms[:order] + [_PI_ZERO] * (order - len(terms))
        self.order = order
        self.terms = tuple(terms)

    @classmethod
    def _wrap(cls, terms: list, order: int) -> "HbarSeries":
        obj = object.__new__(cls)
        obj.order = order
        obj.terms = tuple(terms)
        return obj

    @classmethod
    def zero(cls, order: int) -> "HbarSeries":
        return cls._wrap([_PI_ZERO] * order, order)

    @classmethod
    def one(cls, order: int) -> "HbarSeries":
        if order == 0:
            return cls._wrap([], 0)
        return cls._wrap([_PI_ONE] + [_PI_ZERO] * (order - 1), order)

    @classmethod
    def constant(cls, c, order: int) -> "HbarSeries":
        c = c if isinstance(c, PiScalar) else PiScalar.constant(c)
        if order == 0:
            return cls._wrap([], 0)
        return cls._wrap([c] + [_PI_ZERO] * (order - 1), order)

    @classmethod
    def monomial(cls, k: int, c, order: int) -> "HbarSeries":
        """c * hbar**k."""
        terms = [_PI_ZERO] * order
        if k < order:
            terms[k] = c if isinstance(c, PiScalar) else PiScalar.constant(c)
        return cls._wrap(terms, order)

    def __getitem__(self, k: int) -> PiScalar:
        return self.terms[k]

    def __bool__(self):
        return any(self.terms)

    def is_zero(self) -> bool:
        return not any(self.terms)

    def __eq__(self, other):
        if isinstance(other, HbarSeries):
            n = min(self.order, other.order)
            return self.terms[:n] == other.terms[:n] and self.order == other.order
        return NotImplemented

    def agrees_with(self, other: "HbarSeries", order: int | None = None) -> bool:
        """Equality below hbar**order (default: the common truncation)."""
        n = min(self.order, other.order) if order is None else order
        if n > min(self.order, other.order):
            raise ValueError("cannot compare beyond the available truncation")
        return self.terms[:n] == other.terms[:n]

    def __hash__(self):
        return hash((self.order, self.terms))

    def truncate(self, order: int) -> "HbarSeries":
        if order > self.order:
            raise ValueError(f"cannot raise truncation order {self.order} -> {order}")
        return HbarSeries._wrap(list(self.terms[:order]), order)

    def __add__(self, other):
        if not isinstance(other, HbarSeries):
            other = HbarSeries.constant(other, self.order)
        n = min(self.order, other.order)
        return HbarSeries._wrap([self.terms[k] + other.terms[k] for k in range(n)], n)

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries._wrap([-t for t in self.terms], self.order)

    def __sub__(self, other):
        if not isinstance(other, HbarSeries):
            other = HbarSeries.constant(other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HbarSeries):
            n = min(self.order, other.order)
            a, b = self.terms, other.terms
            out = [_PI_ZERO] * n
            for i in range(n):
                if not a[i]:
                    continue
                for j in range(n - i):
                    if b[j]:
                        out[i + j] = out[i + j] + a[i] * b[j]
            return HbarSeries._wrap(out, n)
        if isinstance(other, PiScalar):
            return HbarSeries._wrap([t * other for t in self.terms], self.order)
        c = as_gr(other)
        return HbarSeries._wrap([t * c for t in self.terms], self.order)

    __rmul__ = __mul__

    def times_pi(self, e: int = 1) -> "HbarSeries":
        return HbarSeries._wrap([t.times_pi(e) for t in self.terms], self.order)

    def shift(self, k: int) -> "HbarSeries":
        """Multiply by hbar**k, keeping the truncation order."""
        if k == 0:
            return self
        n = self.order
        return HbarSeries._wrap([_PI_ZERO] * min(k, n) + list(self.terms[: max(n - k, 0)]), n)

    def divide_hbar(self, k: int) -> "HbarSeries":
        """Exact division by hbar**k; the truncation order drops by k."""
        if k > self.order:
            raise ValueError("division exceeds truncation order")
        if any(self.terms[:k]):
            raise ArithmeticError(f"series is not divisible by hbar^{k}")
        return HbarSeries._wrap(list(self.terms[k:]), self.order - k)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for zero."""
        for k, t in enumerate(self.terms):
            if t:
                return k
        return None

    def inverse(self) -> "HbarSeries":
        """Multiplicative inverse; the hbar^0 coefficient must be a nonzero constant."""
        if self.order == 0:
            return self
        c0 = self.terms[0]
        if not c0 or c0.degree != 0:
            raise ArithmeticError("series is not a unit over Q(i)[pi][[hbar]]")
        inv0 = c0.constant_term().inverse()
        out = [PiScalar.constant(inv0)]
        for k in range(1, self.order):
            acc = _PI_ZERO
            for j in range(1, k + 1):
                if self.terms[j]:
                    acc = acc + self.terms[j] * out[k - j]
            out.append(acc * (-inv0))
        return HbarSeries._wrap(out, self.order)

    def exp(self) -> "HbarSeries":
        """exp of a series with vanishing hbar^0 coefficient."""
        if self.order and self.terms[0]:
            raise ArithmeticError("exp needs a series in hbar * Q(i)[pi][[hbar]]")
        n = self.order
        # E' = x' E, solved coefficientwise: k e_k = sum_j j x_j e_{k-j}
        out = [_PI_ONE] + [_PI_ZERO] * (n - 1) if n else []
        for k in range(1, n):
            acc = _PI_ZERO
            for j in range(1, k + 1):
                if self.terms[j]:
                    acc = acc + self.terms[j] * out[k - j] * j
            out[k] = acc * GaussianRational(Fraction(1, k))
        return HbarSeries._wrap(out, n)

    def __repr__(self):
        return f"HbarSeries({self}; order={self.order})"

    def __str__(self):
        parts = []
        for k, t in enumerate(self.terms):
            if not t:
                continue
            tag = "" if k == 0 else ("ħ" if k == 1 else f"ħ^{k}")
            parts.append(f"[{t}]{tag}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(ħ^{self.order})"
