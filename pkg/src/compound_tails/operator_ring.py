"""The truncated operator ring R_m[D] = R[D] / (D^{m+1}).

Elements are polynomials ``c0 + c1 D + ... + cm D^m`` in the derivation
operator D. Coefficients come from any commutative ring supporting ``+``,
``-`` and ``*`` (Fractions, :class:`~compound_tails.coeff_ring.ParamPoly`,
floats, or sympy expressions for symbolic display).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeff_ring import ParamPoly, render, ring_invert

M_MAX = 16


class OrderMismatchError(ValueError):
    pass


class NonzeroConstantTermError(ValueError):
    pass


def _is_zero(c) -> bool:
    if isinstance(c, ParamPoly):
        return c.is_zero()
    return c == 0


@dataclass(frozen=True)
class TruncatedOperator:
    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(Fraction(c) if type(c) is int else c for c in coeffs)
        if not coeffs:
            raise ValueError("an operator needs at least the D^0 coefficient")
        if len(coeffs) - 1 > M_MAX:
            raise ValueError(f"order {len(coeffs) - 1} exceeds M_MAX={M_MAX}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _check(self, other: "TruncatedOperator"):
        if not isinstance(other, TruncatedOperator):
            raise TypeError(f"expected TruncatedOperator, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatchError(
                f"operators of order {self.order} and {other.order} do not mix"
            )

    def __add__(self, other):
        self._check(other)
        return TruncatedOperator(x + y for x, y in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return TruncatedOperator(-c for c in self.coeffs)

    def __sub__(self, other):
        self._check(other)
        return TruncatedOperator(x - y for x, y in zip(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if not isinstance(other, TruncatedOperator):
            return self.scale(other)
        self._check(other)
        m = self.order
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(m + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return TruncatedOperator(out)

    def __rmul__(self, c):
        return self.scale(c)

    def scale(self, c) -> "TruncatedOperator":
        return TruncatedOperator(c * x for x in self.coeffs)

    def __pow__(self, n: int) -> "TruncatedOperator":
        if n < 0:
            raise ValueError("negative powers: use invert()")
        result = identity_like(self)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def is_nilpotent(self) -> bool:
        return _is_zero(self.coeffs[0])

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def exp(self) -> "TruncatedOperator":
        """exp(A) for nilpotent A; the exponential series stops at A^m / m!."""
        if not self.is_nilpotent():
            raise NonzeroConstantTermError(
                "exp is only defined for operators with zero constant term"
            )
        result = identity_like(self)
        term = result
        for j in range(1, self.order + 1):
            term = (term * self).scale(Fraction(1, j))
            result = result + term
        return result

    def invert(self) -> "TruncatedOperator":
        c0 = self.coeffs[0]
        try:
            c0_inv = ring_invert(c0)
        except (ZeroDivisionError, ArithmeticError) as exc:
            raise NonzeroConstantTermError(
                f"constant term {render(c0, 'θ')} is not invertible"
            ) from exc
        ident = identity_like(self)
        nil = ident - self.scale(c0_inv)
        # A = c0 (Id - nil) and nil^{m+1} = 0
        acc = ident
        for _ in range(self.order):
            acc = ident + nil * acc
        return acc.scale(c0_inv)

    def truncate(self, m: int) -> "TruncatedOperator":
        if m > self.order:
            raise OrderMismatchError(f"cannot raise order {self.order} to {m}")
        return TruncatedOperator(self.coeffs[: m + 1])

    def map_coeffs(self, fn) -> "TruncatedOperator":
        return TruncatedOperator(fn(c) for c in self.coeffs)

    def render(self, symbol: str | None = None) -> str:
        return render_operator(self, symbol)

    def __str__(self):
        return self.render("θ")


def identity_like(A: TruncatedOperator) -> TruncatedOperator:
    one = A.coeffs[0] * 0 + 1
    zero = one - one
    return TruncatedOperator((one,) + (zero,) * A.order)


def op_identity(m: int) -> TruncatedOperator:
    if m < 0:
        raise ValueError("order must be nonnegative")
    return TruncatedOperator((Fraction(1),) + (Fraction(0),) * m)


def op_zero(m: int) -> TruncatedOperator:
    return TruncatedOperator((Fraction(0),) * (m + 1))


def op_d(m: int) -> TruncatedOperator:
    """The derivation D itself in R_m[D] (zero when m = 0)."""
    cs = [Fraction(0)] * (m + 1)
    if m >= 1:
        cs[1] = Fraction(1)
    return TruncatedOperator(cs)


def op_add(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    return A + B


def op_mul(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    return A * B


def op_scale(c, A: TruncatedOperator) -> TruncatedOperator:
    return A.scale(c)


def op_pow(A: TruncatedOperator, n: int) -> TruncatedOperator:
    return A**n


def op_exp_nilpotent(A: TruncatedOperator) -> TruncatedOperator:
    return A.exp()


def op_invert(A: TruncatedOperator) -> TruncatedOperator:
    return A.invert()


def _render_coeff(c, symbol) -> tuple[bool, str, bool]:
    """Return (negative, magnitude text, is_one) for one operator coefficient."""
    if isinstance(c, ParamPoly):
        nonzero = [x for x in c.coeffs if x != 0]
        if len(nonzero) == 1:
            neg = nonzero[0] < 0
            text = (-c if neg else c).render(symbol)
            return neg, text, text == "1"
        return False, f"({c.render(symbol)})", False
    if isinstance(c, (Fraction, int, float)):
        neg = c < 0
        text = render(-c if neg else c)
        return neg, text, text == "1"
    # symbolic (sympy) coefficients
    neg = bool(getattr(c, "could_extract_minus_sign", lambda: False)())
    if neg:
        c = -c
    text = str(c).replace("**", "^")
    if getattr(c, "is_Add", False):
        text = f"({text})"
    return neg, text, text == "1"


def render_operator(A: TruncatedOperator, symbol: str | None = None) -> str:
    """Render as ``c0 + c1*D + c2*D^2 + ...``, skipping zero coefficients."""
    parts = []
    for i, c in enumerate(A.coeffs):
        if _is_zero(c):
            continue
        neg, mag, is_one = _render_coeff(c, symbol)
        if i == 0:
            body = mag
        else:
            d = "D" if i == 1 else f"D^{i}"
            body = d if is_one else f"{mag}*{d}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts) if parts else "0"
