#!/usr/bin/env python3
"""Desk-scale runbook: every table at sizes that finish in about a minute.

Produces a sweep to n = 10^4, the closed-form reference tables, the
structural audit, and a 10^4-digit certified expansion of log3(2), all
under one output directory.

    python3 scripts/desk_scale_run.py --out runs/desk
"""

import argparse
import os
import sys

from tritstats import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/desk", metavar="DIR")
    parser.add_argument("--max-n", type=int, default=10_000)
    args = parser.parse_args()

    steps = [
        ["sweep", "--max-n", str(args.max_n),
         "--out", os.path.join(args.out, "sweep")],
        ["theory", "--max-h", "8", "--sigma-n", f"{args.max_n},1000000",
         "--out", os.path.join(args.out, "theory")],
        ["audit", "--max-n", str(args.max_n),
         "--out", os.path.join(args.out, "audit")],
        ["alpha", "--digits", str(args.max_n),
         "--out", os.path.join(args.out, "alpha_digits.txt")],
    ]
    for argv in steps:
        print(f"$ tritstats {' '.join(argv)}")
        code = cli.main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
