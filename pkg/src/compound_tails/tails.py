"""Symbolic calculus on the tail family e_r(t) = t^r exp(-t^alpha).

The family is closed under d/dt, so applying a truncated operator
sum_i c_i D^i to the summand tail Fbar(t) = exp(-t^alpha) gives a finite
combination of e_r terms. :func:`expansion` builds E[N L^{N-1}] Fbar and
keeps the terms of order at least h^k Fbar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .coeff_ring import ParamPoly, as_poly, parse_poly, parse_rational, render_scalar
from .compound import (
    CountSpec,
    compound_character,
    laplace_character,
    weibull_moments,
)
from .operator_ring import M_MAX, TruncatedOperator


class SummandValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(report.summary())


class InexactMomentsError(ValueError):
    pass


class MissingParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SummandSpec:
    """Summand law with tail exp(-t^alpha) and hazard alpha t^(alpha - 1)."""

    alpha: Fraction

    def __post_init__(self):
        a = self.alpha
        if isinstance(a, str):
            a = parse_rational(a)
        elif not isinstance(a, Fraction):
            a = Fraction(a)
        object.__setattr__(self, "alpha", a)

    @property
    def exact_moments(self) -> bool:
        return self.alpha > 0 and (1 / self.alpha).denominator == 1

    def moments(self, m: int, exact: bool | None = None) -> list:
        exact = self.exact_moments if exact is None else exact
        return weibull_moments(self.alpha, m, exact=exact)

    def tail(self, t):
        return math.exp(-(t ** float(self.alpha)))

    def cdf(self, t):
        return -math.expm1(-(t ** float(self.alpha)))

    def hazard(self, t):
        a = float(self.alpha)
        return a * t ** (a - 1)

    def density(self, t):
        return self.hazard(t) * self.tail(t)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    alpha: Fraction
    conditions: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def summary(self) -> str:
        if self.passed:
            return f"alpha={render_scalar(self.alpha)}: all conditions hold"
        bad = "; ".join(f"{c.name}: {c.detail}" for c in self.failures())
        return f"alpha={render_scalar(self.alpha)} fails {bad}"


def validate_summand(s: SummandSpec) -> ValidationReport:
    """Check the hazard h(t) = alpha t^(alpha-1) against the admissibility conditions."""
    a = s.alpha
    idx = a - 1
    conds = (
        ConditionResult(
            "hazard_regularly_varying",
            a > 0,
            f"h is regularly varying of index {render_scalar(idx)}"
            if a > 0
            else "alpha <= 0 does not define a distribution tail",
        ),
        ConditionResult(
            "t_hazard_to_infinity",
            a > 0,
            "t h(t) = alpha t^alpha tends to infinity" if a > 0 else "t h(t) does not diverge",
        ),
        ConditionResult(
            "hazard_to_zero",
            a < 1,
            "h(t) tends to 0"
            if a < 1
            else f"h(t) = alpha t^({render_scalar(idx)}) does not tend to 0 (not a subexponential tail)",
        ),
        ConditionResult(
            "t_hazard_over_log_positive",
            a > 0,
            "liminf t h(t)/log t = +inf" if a > 0 else "liminf t h(t)/log t is not positive",
        ),
        ConditionResult(
            "hazard_index_in_range",
            -1 <= idx < 0 and a > 0,
            f"hazard index {render_scalar(idx)} lies in [-1, 0)"
            if -1 <= idx < 0 and a > 0
            else f"hazard index {render_scalar(idx)} is outside [-1, 0)",
        ),
    )
    return ValidationReport(a, conds)


@dataclass(frozen=True)
class TailTerm:
    """coeff * t^r * exp(-t^alpha)."""

    coeff: object
    r: Fraction


def _merge(pairs: Iterable[tuple[Fraction, object]]) -> list[TailTerm]:
    acc: dict[Fraction, object] = {}
    for r, c in pairs:
        acc[r] = acc[r] + c if r in acc else c
    out = [TailTerm(c, r) for r, c in acc.items() if not _zero(c)]
    out.sort(key=lambda term: term.r, reverse=True)
    return out


def _zero(c) -> bool:
    return c.is_zero() if isinstance(c, ParamPoly) else c == 0


def tail_differentiate(terms: Sequence[TailTerm], alpha) -> list[TailTerm]:
    """d/dt of sum c t^r e^{-t^alpha} = sum c r t^{r-1} e - c alpha t^{r+alpha-1} e."""
    alpha = Fraction(alpha)
    pairs = []
    for term in terms:
        if term.r != 0:
            pairs.append((term.r - 1, term.coeff * term.r))
        pairs.append((term.r + alpha - 1, term.coeff * (-alpha)))
    return _merge(pairs)


def fbar_derivative(s: SummandSpec, k: int) -> list[TailTerm]:
    terms = [TailTerm(Fraction(1), Fraction(0))]
    for _ in range(k):
        terms = tail_differentiate(terms, s.alpha)
    return terms


def apply_operator(A: TruncatedOperator, s: SummandSpec) -> list[TailTerm]:
    pairs = []
    deriv = [TailTerm(Fraction(1), Fraction(0))]
    for i, c in enumerate(A.coeffs):
        if i:
            deriv = tail_differentiate(deriv, s.alpha)
        if _zero(c):
            continue
        pairs.extend((term.r, c * term.coeff) for term in deriv)
    return _merge(pairs)


def hazard_power_tail(s: SummandSpec, k: int) -> TailTerm:
    """h^k Fbar = alpha^k t^{k(alpha-1)} e^{-t^alpha}."""
    return TailTerm(s.alpha**k, k * (s.alpha - 1))


def eval_term(coeff_value, r, alpha, t: float) -> float:
    """coeff * t^r * exp(-t^alpha) in floating point, kept in log space."""
    c = float(coeff_value)
    if c == 0.0:
        return 0.0
    if t == 0:
        if r < 0:
            raise ValueError("negative exponent at t = 0")
        return c if r == 0 else 0.0
    return c * math.exp(float(r) * math.log(t) - t ** float(alpha))


@dataclass(frozen=True)
class TailExpansion:
    """Finite asymptotic expansion sum_j c_j e_{r_j} + o(h^k Fbar)."""

    alpha: Fraction
    k: int
    terms: tuple
    param_symbol: str | None = None

    @property
    def r_min(self) -> Fraction:
        return self.k * (self.alpha - 1)

    def coeffs(self) -> dict[Fraction, ParamPoly]:
        return {term.r: term.coeff for term in self.terms}

    def truncated(self, j: int) -> "TailExpansion":
        """The order-j expansion: the terms with exponent >= j(alpha - 1)."""
        if j > self.k:
            raise ValueError(f"cannot extend an order-{self.k} expansion to order {j}")
        cut = j * (self.alpha - 1)
        return TailExpansion(
            self.alpha, j, tuple(t for t in self.terms if t.r >= cut), self.param_symbol
        )

    def term_values(self, t: float, param=None) -> list[float]:
        if self.param_symbol is not None and param is None:
            raise MissingParameterError(
                f"expansion is parametric in {self.param_symbol}; a value is required"
            )
        return [
            eval_term(as_poly(term.coeff).evaluate(param if param is not None else 0), term.r, self.alpha, t)
            for term in self.terms
        ]

    def evaluate(self, t: float, param=None) -> float:
        return evaluate_expansion(self, t, param)

    # rendering -------------------------------------------------------------

    def render_text(self) -> str:
        alpha = render_scalar(self.alpha)
        lines = []
        for term in self.terms:
            c = as_poly(term.coeff)
            text = c.render(self.param_symbol)
            if len([x for x in c.coeffs if x != 0]) > 1:
                text = f"({text})"
            lines.append(f"{text} * t^({render_scalar(term.r)}) * exp(-t^({alpha}))")
        return "\n".join(lines)

    def to_json_obj(self) -> dict:
        return {
            "alpha": render_scalar(self.alpha),
            "k": self.k,
            "param_symbol": self.param_symbol,
            "terms": [
                {"coeff": as_poly(t.coeff).render(self.param_symbol), "r": render_scalar(t.r)}
                for t in self.terms
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TailExpansion":
        symbol = obj.get("param_symbol")
        terms = tuple(
            TailTerm(parse_poly(t["coeff"], symbol), parse_rational(t["r"])) for t in obj["terms"]
        )
        return cls(parse_rational(obj["alpha"]), int(obj["k"]), terms, symbol)


def evaluate_expansion(E: TailExpansion, t: float, param=None) -> float:
    """Floating value of the expansion at t; terms summed smallest magnitude first."""
    if t <= 0:
        raise ValueError("t must be positive")
    values = E.term_values(t, param)
    return math.fsum(sorted(values, key=abs))


def expansion(
    s: SummandSpec, count: CountSpec, k: int, exact: bool = True
) -> TailExpansion:
    """Order-k asymptotic expansion of the compound tail P{S_N > t}."""
    report = validate_summand(s)
    if not report.passed:
        raise SummandValidationError(report)
    if not 0 <= k <= M_MAX:
        raise ValueError(f"order must lie in [0, {M_MAX}], got {k}")
    if exact and not s.exact_moments:
        raise InexactMomentsError(
            f"exact expansion needs 1/alpha integral, got alpha={render_scalar(s.alpha)}"
        )
    L = laplace_character(s.moments(k, exact=exact), k)
    C = compound_character(count, L)
    symbol = count.symbol if count.is_formal else None
    cut = k * (s.alpha - 1)
    terms = tuple(
        TailTerm(as_poly(t.coeff), t.r) for t in apply_operator(C, s) if t.r >= cut
    )
    return TailExpansion(s.alpha, k, terms, symbol)
