#!/usr/bin/env python3
"""Run the five benchmark scenarios and print their summary tables.

Each scenario writes ``test<k>_cells.csv`` and ``test<k>_summary.csv`` under
its own subdirectory of ``--out``.  The full run at 30 replications takes a
couple of minutes; ``--single-run`` drops to one replication for a quick look.
"""

import argparse
import sys
import time
from pathlib import Path

from ndglab import GameConfig, benchmark_spec, run_test
from ndglab.experiments import METRICS


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tests", default="1,2,3,4,5", help="comma list of scenario ids")
    parser.add_argument("--replications", type=int, default=30, help="replications per grid cell")
    parser.add_argument("--single-run", action="store_true", help="force one replication per cell")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--tie-break", choices=("smallest", "random"), default="smallest")
    parser.add_argument("--out", default="out", help="output root, one subdirectory per scenario")
    parser.add_argument("--force", action="store_true", help="overwrite existing CSV files")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    reps = 1 if args.single_run else args.replications
    ids = [int(part) for part in args.tests.split(",") if part.strip()]
    base = GameConfig(seed=args.seed)
    for test_id in ids:
        spec = benchmark_spec(test_id, replications=reps, base=base, tie_break=args.tie_break)
        out_dir = Path(args.out) / f"test{test_id}"
        start = time.perf_counter()
        try:
            result = run_test(spec, out_dir=out_dir, force=args.force)
        except FileExistsError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        elapsed = time.perf_counter() - start
        print(f"scenario {test_id}: {len(result.cells)} cells x {reps} replication(s), {elapsed:.1f}s")
        print(f"  {'statistic':<10}" + "".join(f"{m:>18}" for m in METRICS))
        for stat in ("min", "mean", "max"):
            row = "".join(f"{result.summary[stat][m]:>18.2f}" for m in METRICS)
            print(f"  {stat:<10}{row}")
        print(f"  wrote {out_dir}/test{test_id}_cells.csv and test{test_id}_summary.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
