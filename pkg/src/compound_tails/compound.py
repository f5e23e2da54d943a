"""Laplace characters and compound characters E[N L^{N-1}] for count laws.

The character of a law with moments mu_0..mu_m is

    L_m = sum_i (-1)^i mu_i / i! D^i

and for a compound sum S_N the leading operator is E[N L^{N-1}]. Poisson and
geometric counts have closed forms (a exp(a(L - Id)) and
b (Id - b(L - Id))^{-2}); finite-support counts are summed directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .coeff_ring import ParamPoly, render_scalar
from .operator_ring import TruncatedOperator, identity_like

Param = Union[Fraction, float, None]


class InsufficientMomentsError(ValueError):
    pass


class CountSpecError(ValueError):
    pass


def _num(x):
    if x is None or isinstance(x, (Fraction, float)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Poisson:
    """Poisson count with rate ``a``; ``a=None`` keeps the rate formal."""

    a: Param = None
    symbol = "a"

    def __post_init__(self):
        a = _num(self.a)
        if a is not None and not a > 0:
            raise CountSpecError(f"Poisson rate must be positive, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def is_formal(self) -> bool:
        return self.a is None

    @property
    def param_value(self):
        """Value taken by the formal symbol ``a``."""
        return self.a

    def mean(self):
        return ParamPoly.theta() if self.a is None else self.a


@dataclass(frozen=True)
class Geometric:
    """P{N = n} = (1 - a) a^n for n >= 0.

    Characters are expressed in the odds ``b = a/(1 - a)``, which is also
    E[N]. Pass ``a`` (the ratio) or, equivalently, ``b``.
    """

    a: Param = None
    b: Param = None
    symbol = "b"

    def __post_init__(self):
        a, b = _num(self.a), _num(self.b)
        if a is not None and b is not None:
            raise CountSpecError("give either the ratio a or the odds b, not both")
        if b is not None:
            if not b > 0:
                raise CountSpecError(f"geometric odds must be positive, got {b}")
            a = b / (1 + b)
        if a is not None:
            if not 0 < a < 1:
                raise CountSpecError(f"geometric ratio must lie in (0, 1), got {a}")
            b = a / (1 - a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def is_formal(self) -> bool:
        return self.a is None

    @property
    def odds(self):
        return self.b

    @property
    def param_value(self):
        return self.b

    def mean(self):
        return ParamPoly.theta() if self.b is None else self.b


@dataclass(frozen=True)
class Degenerate:
    n: int
    symbol = None
    is_formal = False
    param_value = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise CountSpecError(f"degenerate count must be a nonnegative integer, got {self.n}")

    @property
    def pmf(self) -> dict[int, Fraction]:
        return {self.n: Fraction(1)}

    def mean(self):
        return Fraction(self.n)


@dataclass(frozen=True)
class CustomPmf:
    """Finite-support count law given as ``{n: P{N = n}}`` (exact rationals)."""

    pmf: Mapping[int, Fraction] = field(default_factory=dict)
    symbol = None
    is_formal = False
    param_value = None

    def __post_init__(self):
        clean = {}
        for n, p in dict(self.pmf).items():
            if not isinstance(n, int) or n < 0:
                raise CountSpecError(f"support points must be nonnegative integers, got {n!r}")
            p = Fraction(p) if not isinstance(p, Fraction) else p
            if p < 0:
                raise CountSpecError(f"negative probability {p} at n={n}")
            if p:
                clean[n] = p
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise CountSpecError(f"probabilities sum to {render_scalar(total)}, not 1")
        object.__setattr__(self, "pmf", dict(sorted(clean.items())))

    @property
    def max_support(self) -> int:
        return max(self.pmf)

    def mean(self):
        return sum((n * p for n, p in self.pmf.items()), Fraction(0))


CountSpec = Union[Poisson, Geometric, Degenerate, CustomPmf]


def weibull_moments(alpha, m: int, exact: bool = True) -> list:
    """Moments mu_0..mu_m of the law with tail exp(-t^alpha).

    mu_j = Gamma(j/alpha + 1); this is the integer (jq)! when alpha = 1/q.
    """
    alpha = Fraction(alpha) if not isinstance(alpha, float) else alpha
    if exact:
        q = 1 / alpha
        if isinstance(q, float) or q.denominator != 1:
            raise InsufficientMomentsError(
                f"exact moments need 1/alpha integral, got alpha={alpha}"
            )
        q = int(q)
        return [Fraction(math.factorial(j * q)) for j in range(m + 1)]
    return [1.0] + [math.gamma(j / float(alpha) + 1) for j in range(1, m + 1)]


def laplace_character(mu: Sequence, m: int) -> TruncatedOperator:
    if len(mu) < m + 1:
        raise InsufficientMomentsError(f"order {m} needs {m + 1} moments, got {len(mu)}")
    if mu[0] != 1:
        raise InsufficientMomentsError(f"mu_0 must be 1, got {mu[0]}")
    coeffs = []
    for i in range(m + 1):
        x = Fraction(mu[i]) if isinstance(mu[i], int) else mu[i]
        c = x / math.factorial(i)
        coeffs.append(-c if i % 2 else c)
    return TruncatedOperator(coeffs)


def poisson_compound_character(L: TruncatedOperator, a=None) -> TruncatedOperator:
    """a exp(a (L - Id)); with ``a=None`` the rate stays formal (a ParamPoly)."""
    if a is None:
        a = ParamPoly.theta()
    ident = identity_like(L)
    return (L - ident).scale(a).exp().scale(a)


def geometric_compound_character(L: TruncatedOperator, b=None) -> TruncatedOperator:
    """a(1 - a)(Id - aL)^{-2} rewritten in the odds b as b (Id - b(L - Id))^{-2}."""
    if b is None:
        b = ParamPoly.theta()
    ident = identity_like(L)
    inv = (ident - (L - ident).scale(b)).invert()
    return (inv * inv).scale(b)


def custom_compound_character(count: CountSpec, L: TruncatedOperator) -> TruncatedOperator:
    """sum_n p_n n L^{n-1} over a finite support."""
    if isinstance(count, Degenerate):
        pmf = count.pmf
    elif isinstance(count, CustomPmf):
        pmf = count.pmf
    else:
        raise CountSpecError(f"{type(count).__name__} has no finite pmf")
    ident = identity_like(L)
    acc = ident.scale(0)
    power, k = ident, 0
    for n in sorted(pmf):
        if n == 0:
            continue
        while k < n - 1:
            power, k = power * L, k + 1
        acc = acc + power.scale(pmf[n] * n)
    return acc


def compound_character(count: CountSpec, L: TruncatedOperator) -> TruncatedOperator:
    """E[N L^{N-1}] for any supported count law.

    Formal Poisson/geometric parameters give ParamPoly coefficients in
    ``a``/``b``; numeric ones are substituted directly.
    """
    if isinstance(count, Poisson):
        return poisson_compound_character(L, count.a)
    if isinstance(count, Geometric):
        return geometric_compound_character(L, count.b)
    return custom_compound_character(count, L)
