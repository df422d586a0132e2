"""Dense univariate polynomials over exact rationals.

Used for matching/chromatic polynomials and for fraction-free rank
computations with polynomial matrix entries.  Coefficients are Python ints
or Fractions; all arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _trim(coeffs: list) -> tuple:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Polynomial in one indeterminate, coefficients in ascending degree order."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Scalar] = (), var: str = "X"):
        self.coeffs = _trim(list(coeffs))
        self.var = var

    @classmethod
    def const(cls, c: Scalar, var: str = "X") -> "Poly":
        return cls([c], var=var)

    @classmethod
    def x(cls, var: str = "X") -> "Poly":
        return cls([0, 1], var=var)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, var=self.var)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        o = self._coerce(other)
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out, var=self.var)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], var=self.var)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return Poly((), var=self.var)
        a, b = self.coeffs, o.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Poly(out, var=self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1, var=self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other) -> tuple:
        """Euclidean division over the rationals."""
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        quo = [Fraction(0)] * max(0, len(rem) - len(o.coeffs) + 1)
        dlead = Fraction(o.coeffs[-1])
        dn = len(o.coeffs)
        while len(rem) >= dn and _trim(rem):
            rem = list(_trim(rem))
            if len(rem) < dn:
                break
            shift = len(rem) - dn
            factor = rem[-1] / dlead
            quo[shift] = factor
            for i, c in enumerate(o.coeffs):
                rem[shift + i] -= factor * c
            rem.pop()
        return Poly(quo, var=self.var), Poly(rem, var=self.var)

    def exact_div(self, other) -> "Poly":
        """Division that must leave no remainder (integral-domain exact division)."""
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return Poly([_as_int_if_possible(c) for c in q.coeffs], var=self.var)

    def __call__(self, x: Scalar) -> Scalar:
        acc: Scalar = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scale_to_integer(self) -> "Poly":
        """Multiply by the lcm of coefficient denominators; returns integer-coefficient poly."""
        from math import lcm

        dens = [Fraction(c).denominator for c in self.coeffs]
        m = lcm(*dens) if dens else 1
        return Poly([int(Fraction(c) * m) for c in self.coeffs], var=self.var)

    def coefficient(self, i: int) -> Scalar:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                xp = self.var if i == 1 else f"{self.var}^{i}"
                if c == 1:
                    parts.append(xp)
                elif c == -1:
                    parts.append(f"-{xp}")
                else:
                    parts.append(f"{c}*{xp}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def _as_int_if_possible(c: Scalar) -> Scalar:
    f = Fraction(c)
    return f.numerator if f.denominator == 1 else f


def falling_factorial(k_poly: Poly, r: int) -> Poly:
    """k*(k-1)*...*(k-r+1) as a polynomial in the given variable."""
    out = Poly.const(1, var=k_poly.var)
    for i in range(r):
        out = out * (k_poly - i)
    return out
