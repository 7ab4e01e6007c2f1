"""Univariate polynomials in hbar with Gaussian-rational coefficients."""
from __future__ import annotations

from typing import Iterable, Sequence

from .scalars import GaussianRational, ZERO, ONE, as_gr


class HbarPoly:
    """Dense polynomial in hbar, ``coeffs[k]`` multiplies hbar**k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_gr(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _wrap(cls, cs: list) -> "HbarPoly":
        while cs and not cs[-1]:
            cs.pop()
        obj = object.__new__(cls)
        obj.coeffs = tuple(cs)
        return obj

    @classmethod
    def monomial(cls, k: int, c=1) -> "HbarPoly":
        return cls._wrap([ZERO] * k + [as_gr(c)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, HbarPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, GaussianRational)):
            return self == HbarPoly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def lc(self) -> GaussianRational:
        return self.coeffs[-1]

    def __add__(self, other):
        if not isinstance(other, HbarPoly):
            other = HbarPoly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return HbarPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return HbarPoly._wrap([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, HbarPoly):
            other = HbarPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HbarPoly):
            c = as_gr(other)
            return HbarPoly._wrap([x * c for x in self.coeffs]) if c else HbarPoly()
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return HbarPoly()
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
        return HbarPoly._wrap(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "HbarPoly"):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv = other.lc().inverse()
        if len(rem) - 1 < db:
            return HbarPoly(), self
        quot = [ZERO] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if not c:
                continue
            q = c * inv
            quot[k - db] = q
            for i, y in enumerate(other.coeffs):
                if y:
                    rem[k - db + i] = rem[k - db + i] - q * y
        return HbarPoly._wrap(quot), HbarPoly._wrap(rem[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def hbar_valuation(self) -> int:
        """Largest a with hbar**a dividing self (self must be nonzero)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise ValueError("valuation of the zero polynomial")

    def truncate(self, n: int) -> "HbarPoly":
        return HbarPoly._wrap(list(self.coeffs[:n]))

    def coefficient(self, k: int) -> GaussianRational:
        return self.coeffs[k] if k < len(self.coeffs) else ZERO

    def __repr__(self):
        return f"HbarPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(f"{c}")
            else:
                mono = "ħ" if k == 1 else f"ħ^{k}"
                parts.append(mono if c == 1 else f"({c}){mono}")
        return " + ".join(parts)


def poly_matrix(rows: Sequence[Sequence]) -> list[list[HbarPoly]]:
    """Coerce nested sequences (scalars or HbarPoly) to a matrix of HbarPoly."""
    return [[x if isinstance(x, HbarPoly) else HbarPoly([x]) for x in row] for row in rows]


HBAR = HbarPoly.monomial(1)
POLY_ONE = HbarPoly([ONE])
POLY_ZERO = HbarPoly()
