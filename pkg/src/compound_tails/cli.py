"""Command line front end.

    compound-tails character --count poisson --order 3
    compound-tails expand --alpha 1/3 --count geometric --order 4 --format json
    compound-tails expand ... --format json | compound-tails eval --t 1000 --param 1/2
    compound-tails validate --alpha 5/3
    compound-tails verify --alpha 1/3 --count poisson --param 1/2 --order 4 \
        --t 500,1000,2000 --delta 0.1 --format csv

Exit codes: 0 ok, 2 invalid job, 3 unsupported combination, 4 failed
certified check.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .coeff_ring import parse_rational, render, render_scalar
from .compound import (
    CountSpecError,
    CustomPmf,
    Degenerate,
    Geometric,
    Poisson,
    compound_character,
    geometric_compound_character,
    laplace_character,
    poisson_compound_character,
)
from .oracle import (
    ToleranceNotAchievedError,
    UnsupportedCountError,
    certify,
    error_report,
    report_to_csv,
    report_to_json,
)
from .tails import (
    InexactMomentsError,
    SummandSpec,
    TailExpansion,
    evaluate_expansion,
    expansion,
    validate_summand,
)

EXIT_INVALID = 2
EXIT_UNSUPPORTED = 3
EXIT_CHECK_FAILED = 4


class JobError(Exception):
    def __init__(self, field_name: str, message: str, code: int = EXIT_INVALID):
        super().__init__(f"field '{field_name}': {message}")
        self.code = code


@dataclass
class JobSpec:
    alpha: str | None = None
    count: dict = field(default_factory=lambda: {"kind": "poisson"})
    order: int = 4
    t_grid: list = field(default_factory=list)
    delta: float = 0.1
    output: str = "text"

    @classmethod
    def from_json(cls, obj: dict) -> "JobSpec":
        job = cls()
        summand = obj.get("summand") or {}
        if "alpha" in summand:
            job.alpha = str(summand["alpha"])
        if "count" in obj:
            job.count = dict(obj["count"])
        for name in ("order", "t_grid", "delta", "output"):
            if name in obj:
                setattr(job, name, obj[name])
        return job

    def summand(self, required: bool = True) -> SummandSpec | None:
        if self.alpha is None:
            if required:
                raise JobError("summand.alpha", "missing")
            return None
        try:
            s = SummandSpec(parse_rational(self.alpha))
        except ValueError as exc:
            raise JobError("summand.alpha", str(exc)) from exc
        report = validate_summand(s)
        if not report.passed:
            raise JobError("summand.alpha", report.summary())
        return s

    def count_spec(self):
        kind = str(self.count.get("kind", "")).lower()
        param = self.count.get("param")
        try:
            if kind == "poisson":
                return Poisson(None if param is None else parse_rational(str(param)))
            if kind == "geometric":
                return Geometric(None if param is None else parse_rational(str(param)))
            if kind == "degenerate":
                if param is None:
                    raise JobError("count.param", "degenerate count needs n")
                return Degenerate(int(str(param)))
            if kind == "custom":
                pmf = self.count.get("pmf")
                if not pmf:
                    raise JobError("count.pmf", "custom count needs a pmf")
                return CustomPmf({int(n): parse_rational(str(p)) for n, p in pmf.items()})
        except (CountSpecError, ValueError) as exc:
            name = "count.pmf" if kind == "custom" else "count.param"
            raise JobError(name, str(exc)) from exc
        raise JobError("count.kind", f"unknown count kind {kind!r}")

    def order_value(self) -> int:
        try:
            k = int(self.order)
        except (TypeError, ValueError) as exc:
            raise JobError("order", f"not an integer: {self.order!r}") from exc
        if k < 0:
            raise JobError("order", "must be nonnegative")
        return k


def _parse_pmf(text: str) -> dict:
    out = {}
    for item in text.split(","):
        n, _, p = item.partition(":")
        if not p:
            raise JobError("count.pmf", f"expected n:p pairs, got {item!r}")
        out[n.strip()] = p.strip()
    return out


def _job_from_args(args) -> JobSpec:
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            job = JobSpec.from_json(json.load(fh))
    else:
        job = JobSpec()
    if args.alpha is not None:
        job.alpha = args.alpha
    count = dict(job.count)
    if args.count is not None:
        count = {"kind": args.count}
    if args.param is not None:
        count["param"] = args.param
    if getattr(args, "pmf", None):
        count["pmf"] = _parse_pmf(args.pmf)
    job.count = count
    if args.order is not None:
        job.order = args.order
    if getattr(args, "t", None):
        job.t_grid = [float(x) for x in args.t.split(",")]
    if getattr(args, "delta", None) is not None:
        job.delta = args.delta
    if args.format is not None:
        job.output = args.format
    return job


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --- commands ---------------------------------------------------------------


def _symbolic_character(count, k):
    import sympy as sp

    mu = [1] + list(sp.symbols(f"mu1:{k + 1}")) if k else [1]
    L = laplace_character(mu, k)
    if isinstance(count, Poisson):
        a = sp.Symbol("a") if count.is_formal else sp.Rational(str(count.a))
        C = poisson_compound_character(L, a)
    elif isinstance(count, Geometric):
        b = sp.Symbol("b") if count.is_formal else sp.Rational(str(count.b))
        C = geometric_compound_character(L, b)
    else:
        C = compound_character(count, L)
    return C.map_coeffs(lambda c: sp.factor(sp.sympify(c)))


def cmd_character(job: JobSpec) -> int:
    count = job.count_spec()
    k = job.order_value()
    s = job.summand(required=False)
    symbol = count.symbol if count.is_formal else None
    if s is None:
        C = _symbolic_character(count, k)
        coeffs = [str(c).replace("**", "^") for c in C.coeffs]
        text = C.render()
    else:
        if not s.exact_moments:
            raise JobError("summand.alpha", "exact moments need 1/alpha integral", EXIT_UNSUPPORTED)
        C = compound_character(count, laplace_character(s.moments(k), k))
        coeffs = [render(c, symbol) for c in C.coeffs]
        text = C.render(symbol)
    if job.output == "json":
        obj = {"order": k, "param_symbol": symbol, "coeffs": coeffs}
        _emit(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        _emit(text)
    return 0


def _build_expansion(job: JobSpec) -> tuple[SummandSpec, object, TailExpansion]:
    s = job.summand()
    count = job.count_spec()
    k = job.order_value()
    try:
        E = expansion(s, count, k)
    except InexactMomentsError as exc:
        raise JobError("summand.alpha", str(exc), EXIT_UNSUPPORTED) from exc
    return s, count, E


def render_expansion_json(E: TailExpansion) -> str:
    return json.dumps(E.to_json_obj(), indent=2, ensure_ascii=False) + "\n"


def cmd_expand(job: JobSpec) -> int:
    _, _, E = _build_expansion(job)
    if job.output == "json":
        _emit(render_expansion_json(E))
    else:
        _emit(E.render_text())
    return 0


def cmd_eval(args) -> int:
    source = open(args.input, encoding="utf-8") if args.input else sys.stdin
    with source:
        E = TailExpansion.from_json_obj(json.load(source))
    param = parse_rational(args.param) if args.param is not None else None
    if E.param_symbol is not None and param is None:
        raise JobError("param", f"expansion is parametric in {E.param_symbol}")
    rows = []
    for t in [float(x) for x in args.t.split(",")]:
        rows.append({"t": t, "value": evaluate_expansion(E, t, param)})
    if args.format == "json":
        _emit(json.dumps(rows, indent=2))
    else:
        _emit("\n".join(f"{r['t']!r}\t{r['value']!r}" for r in rows))
    return 0


def cmd_validate(job: JobSpec) -> int:
    s = SummandSpec(parse_rational(job.alpha)) if job.alpha else None
    if s is None:
        raise JobError("summand.alpha", "missing")
    report = validate_summand(s)
    if job.output == "json":
        obj = {
            "alpha": render_scalar(s.alpha),
            "passed": report.passed,
            "conditions": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.conditions
            ],
        }
        _emit(json.dumps(obj, indent=2))
    else:
        for c in report.conditions:
            _emit(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    if not report.passed:
        print(f"error: {report.summary()}", file=sys.stderr)
        return EXIT_INVALID
    return 0


def cmd_verify(job: JobSpec) -> int:
    s, count, E = _build_expansion(job)
    if count.is_formal:
        raise JobError("count.param", "verification needs a numeric parameter", EXIT_UNSUPPORTED)
    if not job.t_grid:
        raise JobError("t_grid", "at least one evaluation point is required")
    try:
        rows = error_report(E, s, count, job.t_grid, float(job.delta))
    except UnsupportedCountError as exc:
        raise JobError("count", str(exc), EXIT_UNSUPPORTED) from exc
    checks = certify(rows, E, count)
    _emit(report_to_json(rows) if job.output == "json" else report_to_csv(rows))
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"check failed: {c.name} at t={c.t!r}: {c.detail}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else 0


# --- argument parsing ---------------------------------------------------------


def _add_job_flags(p: argparse.ArgumentParser, grid: bool = False) -> None:
    p.add_argument("--spec", help="JSON job file (summand, count, order, t_grid, delta, output)")
    p.add_argument("--alpha", help="summand tail exp(-t^alpha), e.g. 1/3")
    p.add_argument("--count", choices=["poisson", "geometric", "degenerate", "custom"])
    p.add_argument("--param", help="Poisson rate a, geometric ratio a, or degenerate n")
    p.add_argument("--pmf", help="custom pmf as n:p pairs, e.g. 1:1/2,2:1/2")
    p.add_argument("--order", type=int, help="truncation order k")
    p.add_argument("--format", choices=["text", "json", "csv"])
    if grid:
        p.add_argument("--t", help="comma separated evaluation points")
        p.add_argument("--delta", type=float, help="oracle grid step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compound-tails",
        description="Asymptotic expansions of compound sums of Weibull-type summands.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_job_flags(sub.add_parser("character", help="print the compound character E[N L^{N-1}]"))
    _add_job_flags(sub.add_parser("expand", help="print the tail expansion"))
    _add_job_flags(sub.add_parser("validate", help="check the admissibility of a summand"))
    _add_job_flags(sub.add_parser("verify", help="compare an expansion with the numeric oracle"), grid=True)
    ev = sub.add_parser("eval", help="evaluate an expansion JSON document")
    ev.add_argument("--input", help="expansion JSON file (default: stdin)")
    ev.add_argument("--t", required=True, help="comma separated evaluation points")
    ev.add_argument("--param", help="value of the formal parameter")
    ev.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            return cmd_eval(args)
        job = _job_from_args(args)
        handler = {
            "character": cmd_character,
            "expand": cmd_expand,
            "validate": cmd_validate,
            "verify": cmd_verify,
        }[args.command]
        return handler(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ToleranceNotAchievedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
