#!/usr/bin/env python3
"""Watch a learning planner's belief close in on the rule-based opponent.

Plays one game per checkpoint length, all on the same seed so each longer
game extends the shorter one, and prints how far the learner's estimate is
from the opponent's true conditional distribution on the contexts it has
actually visited.
"""

import argparse
import sys

import numpy as np

from ndglab import (
    DirichletLearner,
    GameConfig,
    HeuristicAgent,
    HeuristicModel,
    MdpAgent,
    Role,
    heuristic_table,
    run_game,
)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sigma", type=float, default=1.0, help="opponent spread")
    parser.add_argument("--omega", type=float, default=0.5, help="planner reward weight")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--checkpoints", default="60,120,250,500,1000",
        help="comma list of game lengths to report at",
    )
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    truth = heuristic_table(HeuristicModel(sigma=args.sigma, q=10), Role.B)
    print(f"{'rounds':>8} {'contexts seen':>14} {'mean L1 (seen)':>15} {'success %':>10}")
    for rounds in (int(part) for part in args.checkpoints.split(",")):
        config = GameConfig(rounds=rounds, omega_a=args.omega, seed=args.seed)
        learner = DirichletLearner.uniform(10)
        agent_a = MdpAgent(Role.A, args.omega, config.horizon, 10, learner=learner)
        agent_b = HeuristicAgent(Role.B, HeuristicModel(sigma=args.sigma, q=10))
        log = run_game(config, agent_a, agent_b)
        seen = learner.counts.sum(axis=-1) > 9  # more mass than the prior alone
        gap = np.abs(learner.estimate_table() - truth).sum(axis=-1)
        mean_gap = float(gap[seen].mean()) if seen.any() else float("nan")
        print(
            f"{rounds:>8} {int(seen.sum()):>14} {mean_gap:>15.3f} {log.success_rate_pct:>10.2f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
