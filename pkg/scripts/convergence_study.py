"""Residual of each partial expansion against the certified oracle, over a t grid.

Writes a CSV with one row per (count, t, j): the bracket, the partial sum S_j,
and |mid - S_j| / Fbar(t) next to the predicted next contribution
(S_{j+1} - S_j) / Fbar(t).
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from compound_tails.compound import Geometric, Poisson
from compound_tails.oracle import compound_tail_bracket
from compound_tails.tails import SummandSpec, expansion


@dataclass
class StudyConfig:
    alpha: Fraction = Fraction(1, 3)
    param: Fraction = Fraction(1, 2)
    order: int = 4
    delta: float = 0.1
    t_grid: list[float] = field(default_factory=lambda: [250.0, 500.0, 1000.0, 2000.0, 4000.0])


def study(cfg: StudyConfig, out=sys.stdout) -> None:
    s = SummandSpec(cfg.alpha)
    counts = {"poisson": Poisson(cfg.param), "geometric": Geometric(a=cfg.param)}
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["count", "t", "j", "lower", "upper", "partial_sum", "rel_resid", "rel_next", "seconds"])
    for name, count in counts.items():
        E = expansion(s, count, cfg.order)
        for t in cfg.t_grid:
            start = time.perf_counter()
            br = compound_tail_bracket(s, count, t, cfg.delta)
            elapsed = time.perf_counter() - start
            partial = [E.truncated(j).evaluate(t) for j in range(cfg.order + 1)]
            fbar = s.tail(t)
            for j, value in enumerate(partial):
                nxt = (partial[j + 1] - value) / fbar if j < cfg.order else float("nan")
                writer.writerow(
                    [name, t, j, br.lower, br.upper, value, abs(br.mid - value) / fbar, nxt, f"{elapsed:.3f}"]
                )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--param", default="1/2", help="Poisson rate / geometric ratio")
    parser.add_argument("--order", type=int, default=4)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--t", help="comma separated evaluation points")
    args = parser.parse_args()
    cfg = StudyConfig(param=Fraction(args.param), order=args.order, delta=args.delta)
    if args.t:
        cfg.t_grid = [float(x) for x in args.t.split(",")]
    study(cfg)
