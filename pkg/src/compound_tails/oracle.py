"""Numeric ground truth for the compound tail P{S_N > t}.

Two independent routes:

* Panjer recursion on the summand discretized to a grid of step ``delta``,
  once rounding every summand up and once rounding it down. The two runs
  stochastically bracket the true law, so the tails certify an interval.
* Convolution quadrature for n-fold tails F^{*n}(t), used for finite-support
  counts (and as a cross-check of the Panjer route).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Chebyshev

from .compound import CountSpec, CustomPmf, Degenerate, Geometric, Poisson
from .tails import SummandSpec, TailExpansion, eval_term, hazard_power_tail

GRID_SNAP = 1e-9
MAX_CONVOLUTION_N = 8


class InvalidGridError(ValueError):
    pass


class UnsupportedCountError(ValueError):
    pass


class ToleranceNotAchievedError(RuntimeError):
    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (best estimate {estimate!r} +/- {error!r})")
        self.estimate = estimate
        self.error = error


def _grid_index(x: float, delta: float) -> int | None:
    q = x / delta
    k = round(q)
    return k if abs(q - k) <= GRID_SNAP * max(1.0, abs(q)) else None


@dataclass
class DiscretizedSummand:
    delta: float
    masses: np.ndarray
    mode: str
    t_max: float
    deficit: float

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def mean(self) -> float:
        idx = np.arange(len(self.masses), dtype=float)
        return self.delta * math.fsum(idx * self.masses)


def discretize_summand(s: SummandSpec, delta: float, t_max: float, mode: str) -> DiscretizedSummand:
    """Round the summand to the grid {0, delta, 2 delta, ...}.

    ``mode="upper"`` moves the mass of ((j-1) delta, j delta] to j delta, so
    the discrete law dominates F; ``mode="lower"`` moves it to (j-1) delta.
    Mass beyond t_max is not placed on the grid; it is the ``deficit``.
    """
    if mode not in ("lower", "upper"):
        raise ValueError(f"mode must be 'lower' or 'upper', got {mode!r}")
    if not delta > 0:
        raise InvalidGridError(f"grid step must be positive, got {delta}")
    J = _grid_index(t_max, delta)
    if J is None or J < 1:
        raise InvalidGridError(f"t_max={t_max} is not a positive multiple of delta={delta}")
    alpha = float(s.alpha)
    u = (np.arange(J + 1, dtype=float) * delta) ** alpha
    # Fbar(x_{j-1}) - Fbar(x_j) without cancellation in the far tail
    inc = np.exp(-u[:-1]) * -np.expm1(u[:-1] - u[1:])
    masses = np.zeros(J + 1)
    if mode == "upper":
        masses[1:] = inc
    else:
        masses[:-1] = inc
    return DiscretizedSummand(delta, masses, mode, J * delta, math.exp(-u[-1]))


@dataclass
class CompoundPmf:
    pmf: np.ndarray
    delta: float
    mode: str
    deficit: float

    def cdf_through(self, k: int) -> float:
        """P{S = i delta for some i <= k} (excluding the deficit)."""
        if k < 0:
            return 0.0
        if k >= len(self.pmf):
            raise IndexError(f"pmf holds {len(self.pmf)} points, index {k} requested")
        return math.fsum(self.pmf[: k + 1])

    def tail(self, t: float) -> float:
        """1 - sum_{j delta <= t} g_j."""
        k = _grid_index(t, self.delta)
        if k is None:
            k = math.floor(t / self.delta)
        return 1.0 - self.cdf_through(k)


def _panjer_class(count) -> tuple[float, float, float]:
    """(a_P, b_P, P{N=0}) of a Panjer-class count law."""
    if isinstance(count, Poisson):
        if count.is_formal:
            raise UnsupportedCountError("the oracle needs a numeric Poisson rate")
        a = float(count.a)
        return 0.0, a, math.exp(-a)
    if isinstance(count, Geometric):
        if count.is_formal:
            raise UnsupportedCountError("the oracle needs a numeric geometric parameter")
        a = float(count.a)
        return a, 0.0, 1.0 - a
    raise UnsupportedCountError(
        f"{type(count).__name__} is outside the Panjer class; use convolution_tail"
    )


def _pgf(count, z: float) -> float:
    if isinstance(count, Poisson):
        return math.exp(float(count.a) * (z - 1.0))
    a = float(count.a)
    return (1.0 - a) / (1.0 - a * z)


def panjer_compound(count: CountSpec, d: DiscretizedSummand, n_out: int | None = None) -> CompoundPmf:
    """Compound pmf g on the summand grid by the Panjer recursion.

    g_0 = pgf_N(f_0), g_k = sum_{j=1..k} (a_P + b_P j/k) f_j g_{k-j} / (1 - a_P f_0).
    The summand deficit is treated as mass at +infinity, so g only carries
    paths where every summand stays on the grid.
    """
    a_p, b_p, _ = _panjer_class(count)
    f = d.masses
    n_out = len(f) if n_out is None else n_out
    if n_out < 1:
        raise ValueError("n_out must be at least 1")
    fp = np.zeros(n_out)
    m = min(n_out, len(f))
    fp[:m] = f[:m]
    jf = np.arange(n_out, dtype=float) * fp
    g = np.zeros(n_out)
    g[0] = _pgf(count, fp[0])
    scale = 1.0 / (1.0 - a_p * fp[0])
    for k in range(1, n_out):
        rev = g[k - 1 :: -1]
        acc = b_p / k * np.dot(jf[1 : k + 1], rev)
        if a_p:
            acc += a_p * np.dot(fp[1 : k + 1], rev)
        g[k] = acc * scale
    deficit = 1.0 - _pgf(count, 1.0 - d.deficit)
    return CompoundPmf(g, d.delta, d.mode, deficit)


# --- convolution quadrature -------------------------------------------------


def _gauss_panels(upper: np.ndarray, n_panels: int, q: int):
    """Composite Gauss-Legendre nodes/weights on [0, upper_i] for each row i."""
    x, w = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    unit_x = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    unit_w = (half[:, None] * w[None, :]).ravel()
    return upper[:, None] * unit_x[None, :], upper[:, None] * unit_w[None, :]


class _Tail:
    """T(w) = P{S_k > w}, stored as T(w) = R(w^alpha) exp(-w^alpha)."""

    def __init__(self, alpha: float, ratio=None):
        self.alpha = alpha
        self.ratio = ratio

    def __call__(self, w: np.ndarray) -> np.ndarray:
        u = np.maximum(w, 0.0) ** self.alpha
        r = 1.0 if self.ratio is None else self.ratio(u)
        return r * np.exp(-u)

    def at_u(self, u: np.ndarray) -> np.ndarray:
        r = 1.0 if self.ratio is None else self.ratio(u)
        return r * np.exp(-u)


def _next_tail_values(prev: _Tail, s: np.ndarray, q: int) -> np.ndarray:
    """P{S_k > s} = Fbar(s) + int_0^s f(x) P{S_{k-1} > s - x} dx, vectorized in s.

    The integral is split at s/2. On [0, s/2] substitute v = x^alpha, so
    f(x) dx = e^{-v} dv; on [s/2, s] substitute y = (s - x)^alpha so the
    previous tail is evaluated at its interpolation variable.
    """
    alpha = prev.alpha
    inv = 1.0 / alpha
    s = np.asarray(s, dtype=float)
    out = np.exp(-(s**alpha))
    pos = s > 0
    if not pos.any():
        return out
    sp = s[pos]
    half_u = (0.5 * sp) ** alpha
    n_panels = int(max(2, math.ceil(half_u.max())))
    v, wv = _gauss_panels(half_u, n_panels, q)
    part_a = np.sum(wv * np.exp(-v) * prev(sp[:, None] - v**inv), axis=1)
    y, wy = _gauss_panels(half_u, n_panels, q)
    x = sp[:, None] - y**inv
    fx = x ** (alpha - 1.0) * np.exp(-(x**alpha))
    part_b = np.sum(wy * fx * y ** (inv - 1.0) * prev.at_u(y), axis=1)
    out[pos] += part_a + part_b
    return out


def _convolution_run(s: SummandSpec, n: int, t: float, deg: int, q: int) -> float:
    alpha = float(s.alpha)
    prev = _Tail(alpha)
    u_max = t**alpha
    for _ in range(2, n):
        prev_k = prev

        def ratio_values(u, prev_k=prev_k):
            w = np.asarray(u) ** (1.0 / alpha)
            return _next_tail_values(prev_k, w, q) * np.exp(u)

        cheb = Chebyshev.interpolate(ratio_values, deg, domain=[0.0, u_max])
        prev = _Tail(alpha, cheb)
    return float(_next_tail_values(prev, np.array([t]), q)[0])


@dataclass
class ConvolutionTail:
    n: int
    t: float
    value: float
    error: float

    @property
    def lower(self) -> float:
        return max(0.0, self.value - self.error)

    @property
    def upper(self) -> float:
        return min(1.0, self.value + self.error)


def convolution_tail(s: SummandSpec, n: int, t: float, tol: float = 1e-8) -> ConvolutionTail:
    """F^{*n}(t) by nested quadrature of the convolution integral.

    Each intermediate tail is a Chebyshev interpolant in u = w^alpha. The error
    estimate compares a run against one with doubled interpolation degree and
    quadrature order; both are doubled until it falls below ``tol * value``.
    """
    if not 0 < n <= MAX_CONVOLUTION_N:
        raise ValueError(f"n must lie in [1, {MAX_CONVOLUTION_N}], got {n}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    # exp(-u) inherits a relative error of about u * eps from rounding u = t^alpha
    floor = (t ** float(s.alpha) + 4.0) * np.finfo(float).eps
    if n == 1 or t == 0:
        value = s.tail(t)
        return ConvolutionTail(n, t, value, floor * value)
    deg, q = 24, 16
    coarse = _convolution_run(s, n, t, deg, q)
    while True:
        fine = _convolution_run(s, n, t, 2 * deg, 2 * q)
        err = abs(fine - coarse) + floor * fine
        if err <= tol * fine:
            return ConvolutionTail(n, t, fine, float(err))
        if deg >= 192:
            raise ToleranceNotAchievedError(
                f"convolution tail n={n}, t={t} did not reach rel. tol {tol}", fine, err
            )
        deg, q, coarse = 2 * deg, 2 * q, fine


# --- brackets ---------------------------------------------------------------


@dataclass
class OracleBracket:
    t: float
    lower: float
    upper: float
    delta: float | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def relative_width(self) -> float:
        return self.width / self.mid if self.mid > 0 else math.inf

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def _pmf_of(count) -> dict[int, Fraction] | None:
    if isinstance(count, (Degenerate, CustomPmf)):
        return count.pmf
    return None


def compound_tail_bracket(
    s: SummandSpec,
    count: CountSpec,
    t: float,
    delta: float = 0.1,
    t_max: float | None = None,
    tol: float = 1e-8,
) -> OracleBracket:
    """Certified interval for P{S_N > t}.

    Panjer-class counts use the paired rounded-up/rounded-down recursions;
    finite-support counts sum n-fold convolution tails.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    pmf = _pmf_of(count)
    if pmf is not None:
        if max(pmf) > MAX_CONVOLUTION_N:
            raise UnsupportedCountError(
                f"finite counts are limited to support <= {MAX_CONVOLUTION_N}"
            )
        lo = hi = 0.0
        for n, p in pmf.items():
            if n == 0:
                continue
            ct = convolution_tail(s, n, t, tol)
            lo += float(p) * ct.lower
            hi += float(p) * ct.upper
        return OracleBracket(t, float(min(lo, 1.0)), float(min(hi, 1.0)), None, {"method": "convolution"})

    _, _, p0 = _panjer_class(count)
    k_up = _grid_index(t, delta)
    if k_up is None:
        k_up = math.floor(t / delta)
        k_lo = k_up + 1
    else:
        k_lo = k_up
    if t_max is None:
        J = max(math.ceil(4 * t / delta), k_lo + 1, 8)
        t_max = J * delta
    up = discretize_summand(s, delta, t_max, "upper")
    dn = discretize_summand(s, delta, t_max, "lower")
    if len(up.masses) <= k_up:
        raise InvalidGridError("t_max must exceed the evaluation point")
    g_up = panjer_compound(count, up, n_out=k_up + 1)
    upper = 1.0 - g_up.cdf_through(k_up)
    if t == 0:
        # S > 0 exactly when N >= 1
        lower = 1.0 - p0
    else:
        # the summands are continuous, so S exceeds its rounded-down version
        # whenever N >= 1: P{S > t} >= P{S_down >= t}
        g_dn = panjer_compound(count, dn, n_out=max(k_lo, 1))
        lower = 1.0 - g_dn.cdf_through(k_lo - 1)
    lower = max(lower, 0.0)
    upper = min(max(upper, lower), 1.0)
    diag = {
        "method": "panjer",
        "grid_points": k_up + 1,
        "t_max": up.t_max,
        "summand_deficit": up.deficit,
    }
    return OracleBracket(t, float(lower), float(upper), delta, diag)


# --- error report -----------------------------------------------------------

REPORT_FIELDS = (
    "t",
    "j",
    "partial_sum",
    "lower",
    "upper",
    "abs_resid_lo",
    "abs_resid_hi",
    "norm_resid_lo",
    "norm_resid_hi",
)


@dataclass
class ReportRow:
    t: float
    j: int
    partial_sum: float
    lower: float
    upper: float
    abs_resid_lo: float
    abs_resid_hi: float
    norm_resid_lo: float
    norm_resid_hi: float


def expansion_param(E: TailExpansion, count: CountSpec):
    """Numeric value for the expansion's formal symbol, taken from ``count``."""
    if E.param_symbol is None:
        return None
    value = count.param_value
    if value is None:
        raise UnsupportedCountError("verification needs a numeric count parameter")
    return value


def error_report(
    E: TailExpansion,
    s: SummandSpec,
    count: CountSpec,
    t_grid: Sequence[float],
    delta: float = 0.1,
) -> list[ReportRow]:
    """Residuals of each order-j partial expansion S_j against the oracle bracket.

    The normalized residual divides by h^j Fbar, the scale of the o(.) remainder.
    """
    param = expansion_param(E, count)
    rows = []
    for t in t_grid:
        br = compound_tail_bracket(s, count, t, delta)
        for j in range(E.k + 1):
            partial = E.truncated(j).evaluate(t, param)
            hk = hazard_power_tail(s, j)
            norm = eval_term(hk.coeff, hk.r, s.alpha, t)
            lo, hi = br.lower - partial, br.upper - partial
            rows.append(ReportRow(t, j, partial, br.lower, br.upper, lo, hi, lo / norm, hi / norm))
    return rows


@dataclass
class CheckResult:
    name: str
    t: float
    passed: bool
    detail: str


def certify(rows: Sequence[ReportRow], E: TailExpansion, count: CountSpec) -> list[CheckResult]:
    """Certified checks on an error report.

    Per t: the bracket is a proper sub-interval of [0, 1], and the order-k
    residual fits within the bracket half-width plus three times the last
    retained term (the term at exponent k(alpha - 1), if present).
    """
    param = expansion_param(E, count)
    last = [term for term in E.terms if term.r == E.r_min]
    results = []
    for t in sorted({r.t for r in rows}):
        top = next(r for r in rows if r.t == t and r.j == E.k)
        ok = 0.0 <= top.lower <= top.upper <= 1.0
        results.append(CheckResult("bracket", t, ok, f"[{top.lower!r}, {top.upper!r}]"))
        mid = 0.5 * (top.lower + top.upper)
        half = 0.5 * (top.upper - top.lower)
        tail_term = 0.0
        if last:
            c = last[0].coeff
            cv = c.evaluate(param if param is not None else 0)
            tail_term = abs(eval_term(cv, last[0].r, E.alpha, t))
        resid = abs(mid - top.partial_sum)
        bound = half + 3 * tail_term
        results.append(
            CheckResult("remainder", t, resid <= bound, f"|resid|={resid:.3e} bound={bound:.3e}")
        )
    return results


def report_to_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in asdict(row).items()})
    return buf.getvalue()


def report_to_json(rows: Sequence[ReportRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
