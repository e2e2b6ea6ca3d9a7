#!/usr/bin/env python3
"""Full-scale runbook: the checkpointed n = 1..10^6 sweep.

Expect a couple of hours of wall time.  The run snapshots every 100k
exponents; rerunning this script after an interruption picks the scan up
from the last snapshot instead of starting over.

    python3 scripts/full_scale_sweep.py --out runs/full
"""

import argparse
import os
import sys

from tritstats import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/full", metavar="DIR")
    parser.add_argument("--max-n", type=int, default=1_000_000)
    parser.add_argument("--checkpoint-every", type=int, default=100_000)
    args = parser.parse_args()

    checkpoint = os.path.join(args.out, "checkpoint.json")
    if os.path.exists(checkpoint):
        print(f"checkpoint found at {checkpoint}; resuming")
        return cli.main(["resume", "--checkpoint", checkpoint])
    os.makedirs(args.out, exist_ok=True)
    return cli.main([
        "sweep",
        "--max-n", str(args.max_n),
        "--checkpoint-every", str(args.checkpoint_every),
        "--checkpoint-file", checkpoint,
        "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
