#!/usr/bin/env python3
"""Print the worked examples: the rank-one diagonal whose factored polynomial
has lower degree than the classical one, the zero element, the diagonal
algebra where a naive determinant reading breaks multiplicativity, and the
identity-approximation walk for a nilpotent."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from specrank.cli import main as cli_main  # noqa: E402


def main() -> int:
    for name in ("m3_example", "zero_example", "c3_naive_det", "ch_walkthrough"):
        code = cli_main(["demo", name, "--seed", "20240"])
        if code != 0:
            return code
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
