#!/usr/bin/env python3
"""Time the O(n) jackknife path against the O(n^2) recomputation path.

Usage:
    python scripts/bench_jackknife.py [--sizes 1000,10000,100000] [--with-naive-max 5000]

Thin wrapper over `mvcjack bench`; kept as a script so the benchmark is
runnable straight from a source checkout.
"""

import argparse
import sys

from mvcjack.cli import main as cli_main


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,10000,100000")
    parser.add_argument("--with-naive-max", type=int, default=5000)
    args = parser.parse_args(argv)
    return cli_main(["bench", "--sizes", args.sizes,
                     "--with-naive-max", str(args.with_naive_max)])


if __name__ == "__main__":
    sys.exit(main())
