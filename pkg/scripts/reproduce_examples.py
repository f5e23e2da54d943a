"""Print the Poisson and geometric characters and order-4 expansions for exp(-t^(1/3))."""
from __future__ import annotations

import argparse
from fractions import Fraction

from compound_tails.cli import main as cli_main
from compound_tails.compound import Geometric, Poisson
from compound_tails.tails import SummandSpec, expansion


def show(title: str, body: str) -> None:
    print(f"## {title}")
    print(body)
    print()


def run(order: int) -> None:
    s = SummandSpec(Fraction(1, 3))
    for name, count in (("poisson", Poisson()), ("geometric", Geometric())):
        print(f"## {name} character, symbolic moments, order 3")
        cli_main(["character", "--count", name, "--order", "3"])
        print()
        show(f"{name} expansion, alpha=1/3, order {order}", expansion(s, count, order).render_text())


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--order", type=int, default=4)
    run(parser.parse_args().order)
