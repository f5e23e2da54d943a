"""Exact coefficient arithmetic.

Two coefficient rings are used by the operator ring:

* ``Rational``: arbitrary precision rationals, i.e. :class:`fractions.Fraction`.
* :class:`ParamPoly`: univariate polynomials with rational coefficients in a
  single formal parameter (the Poisson rate ``a`` or the geometric odds ``b``).

Both support ``+``, ``-``, ``*`` and comparison with plain numbers, so the
operator ring can stay generic over its coefficients.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Number
from typing import Iterable, Union

Rational = Fraction

Scalar = Union[int, Fraction, float]


class NonInvertibleError(ArithmeticError):
    """Raised when a ring element has no multiplicative inverse."""


def _coerce(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not ring elements")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, float)):
        return c
    if isinstance(c, Number):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


class ParamPoly:
    """Polynomial ``c0 + c1*θ + c2*θ^2 + ...`` in one formal parameter θ.

    Stored canonically: trailing zero coefficients are stripped, so the zero
    polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("ParamPoly is immutable")

    @classmethod
    def const(cls, c: Scalar) -> "ParamPoly":
        return cls((c,))

    @classmethod
    def theta(cls) -> "ParamPoly":
        """The formal parameter itself."""
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Fraction(0)

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _lift(other):
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, Number) and not isinstance(other, bool):
            return ParamPoly.const(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return ParamPoly(self.coeff(j) + other.coeff(j) for j in range(n))

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(-c for c in self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, Number) and not isinstance(other, bool):
            c = _coerce(other)
            return ParamPoly(x * c for x in self.coeffs)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ParamPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return ParamPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ParamPoly):
            return self * other.invert()
        if isinstance(other, Number) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division of a polynomial by zero")
            c = _coerce(other)
            inv = 1 / c if isinstance(c, float) else Fraction(1) / c
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        return lifted * self.invert()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result, base = ParamPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def invert(self) -> "ParamPoly":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no inverse")
        if self.degree > 0:
            raise NonInvertibleError(
                f"polynomial of degree {self.degree} is not invertible"
            )
        c = self.coeffs[0]
        return ParamPoly.const(1 / c if isinstance(c, float) else Fraction(1) / c)

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.coeff(0))
        return hash(self.coeffs)

    # evaluation and rendering ---------------------------------------------

    def evaluate(self, v):
        """Horner evaluation; exact when ``v`` is an int or Fraction."""
        acc = Fraction(0) if not isinstance(v, float) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def render(self, symbol: str | None = "θ") -> str:
        if self.is_zero():
            return "0"
        if self.degree > 0 and not symbol:
            raise ValueError("a parametric polynomial needs a symbol to render")
        out = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            neg = c < 0
            mag = render_scalar(-c if neg else c)
            if j == 0:
                body = mag
            else:
                var = symbol if j == 1 else f"{symbol}^{j}"
                body = var if mag == "1" else f"{mag}*{var}"
            if not out:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self):
        return f"ParamPoly({self.render()!r})"

    __str__ = render


def render_scalar(x) -> str:
    """Render a rational as ``p/q`` (or ``p`` when q = 1); floats via repr."""
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def render(x, symbol: str | None = None) -> str:
    if isinstance(x, ParamPoly):
        return x.render(symbol)
    return render_scalar(x)


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, an integer, or a finite decimal into an exact Fraction."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    return value


def _parse_scalar(text: str):
    if _RATIONAL.match(text):
        return Fraction(text)
    return float(text)


_TERM = re.compile(
    r"^(?:(?P<c>[0-9][0-9./eE+-]*)(?:\*|$))?(?P<v>[A-Za-zθ]+)?(?:\^(?P<p>\d+))?$"
)


def parse_poly(text: str, symbol: str | None = None) -> ParamPoly:
    """Inverse of :meth:`ParamPoly.render`."""
    text = text.strip()
    if text == "0":
        return ParamPoly()
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    pieces = re.split(r" ([+-]) ", text)
    signs = [sign] + [1 if s == "+" else -1 for s in pieces[1::2]]
    coeffs: dict[int, object] = {}
    for sgn, term in zip(signs, pieces[0::2]):
        m = _TERM.match(term)
        if not m or (m.group("c") is None and m.group("v") is None):
            raise ValueError(f"cannot parse polynomial term {term!r}")
        c = _parse_scalar(m.group("c")) if m.group("c") else Fraction(1)
        if m.group("v"):
            if symbol is not None and m.group("v") != symbol:
                raise ValueError(f"unexpected symbol {m.group('v')!r}")
            power = int(m.group("p") or 1)
        else:
            if m.group("p"):
                raise ValueError(f"cannot parse polynomial term {term!r}")
            power = 0
        coeffs[power] = coeffs.get(power, 0) + sgn * c
    deg = max(coeffs)
    return ParamPoly(coeffs.get(j, 0) for j in range(deg + 1))


def as_poly(x) -> ParamPoly:
    return x if isinstance(x, ParamPoly) else ParamPoly.const(x)


# Functional ring interface ----------------------------------------------------


def ring_add(x, y):
    return x + y


def ring_mul(x, y):
    return x * y


def ring_invert(x):
    """Multiplicative inverse of a Rational, or of a constant ParamPoly."""
    if isinstance(x, ParamPoly):
        return x.invert()
    if x == 0:
        raise ZeroDivisionError("zero has no inverse")
    if isinstance(x, (int, Fraction)):
        return Fraction(1) / x
    return 1 / x


def ring_evaluate(p: ParamPoly, v):
    return as_poly(p).evaluate(v)
