"""Benchmark scenarios: five agent pairings swept over reward weights.

1. Lookahead planner holding a fixed rule-structured model (sigma 3)
   against the rule-based opponent (sigma 1); the planner weight is swept.
2. Same pairing, but the planner learns the opponent from a uniform prior.
3. Two non-learning planners holding uniform models; both weights swept.
4. Two learning planners starting from uniform priors.
5. Two learning planners whose priors come from a 30-round warm-up game.

Each grid cell runs a configurable number of seeded replications; per-cell
results keep the raw per-replication metrics so summaries can be recomputed
any way a caller needs.  Cells are independent work items and can run in
parallel (capped by the ``NDG_THREADS`` environment variable).
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import GameConfig, Role
from .engine import HeuristicAgent, RngPlan, pretrain, run_game
from .opponent import HeuristicModel, heuristic_table, make_prior, uniform_table
from .planner import MdpAgent

__all__ = [
    "AgentSpec",
    "ExperimentSpec",
    "CellResult",
    "SweepSummary",
    "DEFAULT_OMEGA_GRID",
    "METRICS",
    "benchmark_spec",
    "build_agent",
    "run_cell",
    "run_test",
    "aggregate",
    "write_cells_csv",
    "read_cells_csv",
    "write_summary_csv",
    "read_summary_csv",
]

DEFAULT_OMEGA_GRID = tuple(i / 10 for i in range(11))
METRICS = ("profit_a", "profit_b", "total", "success_rate_pct")

AGENT_KINDS = ("mdp", "heuristic")
PRIOR_KINDS = ("uniform", "heuristic", "pretrained")
FIXED_MODELS = ("uniform", "heuristic")


@dataclass(frozen=True)
class AgentSpec:
    """Declarative description of one player in a scenario."""

    kind: str  # "mdp" | "heuristic"
    learning: bool = False
    prior: str | None = None  # for learning planners
    fixed_model: str | None = None  # for non-learning planners
    sigma: float | None = None  # spread of a heuristic agent, model, or prior

    def __post_init__(self) -> None:
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"kind must be one of {AGENT_KINDS}, got {self.kind!r}")
        if self.kind == "heuristic":
            if self.learning or self.prior or self.fixed_model:
                raise ValueError("heuristic agents neither learn nor hold a model")
            if self.sigma is None or self.sigma <= 0:
                raise ValueError("heuristic agents need a positive sigma")
            return
        if self.learning:
            if self.prior not in PRIOR_KINDS:
                raise ValueError(f"learning planner needs a prior in {PRIOR_KINDS}")
            if self.fixed_model is not None:
                raise ValueError("a learning planner cannot also hold a fixed model")
            if self.prior == "heuristic" and (self.sigma is None or self.sigma <= 0):
                raise ValueError("heuristic prior needs a positive sigma")
        else:
            if self.fixed_model not in FIXED_MODELS:
                raise ValueError(f"non-learning planner needs a model in {FIXED_MODELS}")
            if self.prior is not None:
                raise ValueError("a non-learning planner takes no prior")
            if self.fixed_model == "heuristic" and (self.sigma is None or self.sigma <= 0):
                raise ValueError("heuristic-structured model needs a positive sigma")


@dataclass(frozen=True)
class ExperimentSpec:
    """A full sweep: two agent specs, the weight grid(s), and run settings."""

    test_id: int
    agent_a: AgentSpec
    agent_b: AgentSpec
    omega_grid_a: tuple[float, ...]
    omega_grid_b: tuple[float, ...] | None  # None: one-dimensional sweep over A only
    replications: int
    base: GameConfig
    tie_break: str = "smallest"
    pretrain_rounds: int = 0

    def validate(self) -> None:
        grids = [("omega_grid_a", self.omega_grid_a)]
        if self.omega_grid_b is not None:
            grids.append(("omega_grid_b", self.omega_grid_b))
        for name, grid in grids:
            if not grid:
                raise ValueError(f"{name} must not be empty")
            for w in grid:
                if not 0.0 <= w <= 1.0:
                    raise ValueError(f"{name} values must lie in [0, 1], got {w}")
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if self.tie_break not in ("smallest", "random"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")
        if self.pretrain_rounds < 0:
            raise ValueError("pretrain_rounds must be non-negative")
        needs_warmup = "pretrained" in (self.agent_a.prior, self.agent_b.prior)
        if needs_warmup and self.pretrain_rounds == 0:
            raise ValueError("a pretrained prior needs pretrain_rounds > 0")

    def cells(self) -> list[tuple[float, float]]:
        if self.omega_grid_b is None:
            return [(wa, self.base.omega_b) for wa in self.omega_grid_a]
        return [(wa, wb) for wa in self.omega_grid_a for wb in self.omega_grid_b]


def benchmark_spec(
    test_id: int,
    *,
    replications: int = 30,
    base: GameConfig | None = None,
    tie_break: str = "smallest",
    grid: tuple[float, ...] | None = None,
) -> ExperimentSpec:
    """Build one of the five built-in scenarios; ``grid`` overrides the sweep axis."""
    base = base if base is not None else GameConfig()
    g = tuple(grid) if grid is not None else DEFAULT_OMEGA_GRID
    planner_fixed_heuristic = AgentSpec("mdp", fixed_model="heuristic", sigma=3.0)
    planner_fixed_uniform = AgentSpec("mdp", fixed_model="uniform")
    planner_learn_uniform = AgentSpec("mdp", learning=True, prior="uniform")
    planner_learn_pretrained = AgentSpec("mdp", learning=True, prior="pretrained")
    rule_based = AgentSpec("heuristic", sigma=1.0)
    if test_id == 1:
        return ExperimentSpec(1, planner_fixed_heuristic, rule_based, g, None, replications, base, tie_break)
    if test_id == 2:
        return ExperimentSpec(2, planner_learn_uniform, rule_based, g, None, replications, base, tie_break)
    if test_id == 3:
        return ExperimentSpec(3, planner_fixed_uniform, planner_fixed_uniform, g, g, replications, base, tie_break)
    if test_id == 4:
        return ExperimentSpec(4, planner_learn_uniform, planner_learn_uniform, g, g, replications, base, tie_break)
    if test_id == 5:
        return ExperimentSpec(
            5, planner_learn_pretrained, planner_learn_pretrained, g, g, replications, base, tie_break,
            pretrain_rounds=30,
        )
    raise ValueError(f"unknown benchmark id {test_id}; expected 1..5")


def build_agent(spec: AgentSpec, role: Role, omega: float, config: GameConfig, tie_break: str):
    """Instantiate one player.  Pretrained priors start uniform; the warm-up
    game that fills them is run by the caller."""
    q = config.q
    if spec.kind == "heuristic":
        return HeuristicAgent(role, HeuristicModel(sigma=spec.sigma, q=q))
    if spec.learning:
        if spec.prior == "heuristic":
            learner = make_prior("heuristic", q, sigma=spec.sigma, opponent=role.other)
        else:  # uniform, or pretrained before its warm-up
            learner = make_prior("uniform", q)
        return MdpAgent(role, omega, config.horizon, q, learner=learner, tie_break=tie_break)
    if spec.fixed_model == "heuristic":
        model = heuristic_table(HeuristicModel(sigma=spec.sigma, q=q), role.other)
    else:
        model = uniform_table(q)
    return MdpAgent(role, omega, config.horizon, q, model=model, tie_break=tie_break)


@dataclass(frozen=True)
class CellResult:
    """Raw per-replication metrics of one grid cell."""

    omega_a: float
    omega_b: float
    profit_a: tuple[float, ...]
    profit_b: tuple[float, ...]
    total: tuple[float, ...]
    success_rate_pct: tuple[float, ...]

    def rep_values(self, metric: str) -> np.ndarray:
        return np.asarray(getattr(self, metric), dtype=float)

    def rep_mean(self, metric: str) -> float:
        return float(self.rep_values(metric).mean())


@dataclass(frozen=True)
class SweepSummary:
    """All cells of one sweep plus min/mean/max statistics over the grid."""

    spec: ExperimentSpec
    cells: tuple[CellResult, ...]
    summary: dict

    def rep_level_means(self, metric: str) -> np.ndarray:
        """Per-replication means over the whole grid; useful for statistics."""
        stacked = np.stack([c.rep_values(metric) for c in self.cells])
        return stacked.mean(axis=0)


def _cell_seed_seqs(base_seed: int, cell_index: int, reps: int) -> list[np.random.SeedSequence]:
    # Stateless derivation keyed on (cell, replication): stable under any
    # execution order, so parallel and serial sweeps produce identical output.
    return [
        np.random.SeedSequence(entropy=base_seed, spawn_key=(cell_index, rep))
        for rep in range(reps)
    ]


def run_cell(
    spec: ExperimentSpec,
    omega_a: float,
    omega_b: float,
    seed_seqs,
) -> CellResult:
    """Run every replication of one grid cell."""
    profits_a, profits_b, totals, successes = [], [], [], []
    for seq in seed_seqs:
        config = replace(spec.base, omega_a=omega_a, omega_b=omega_b)
        plan = RngPlan(seq)
        agent_a = build_agent(spec.agent_a, Role.A, omega_a, config, spec.tie_break)
        agent_b = build_agent(spec.agent_b, Role.B, omega_b, config, spec.tie_break)
        if spec.pretrain_rounds and "pretrained" in (spec.agent_a.prior, spec.agent_b.prior):
            learner_a, learner_b = pretrain(config, agent_a, agent_b, spec.pretrain_rounds, plan)
            agent_a = MdpAgent(
                Role.A, omega_a, config.horizon, config.q, learner=learner_a, tie_break=spec.tie_break
            )
            agent_b = MdpAgent(
                Role.B, omega_b, config.horizon, config.q, learner=learner_b, tie_break=spec.tie_break
            )
        log = run_game(config, agent_a, agent_b, plan)
        profits_a.append(float(log.cum_profit_a))
        profits_b.append(float(log.cum_profit_b))
        totals.append(float(log.cum_profit_a + log.cum_profit_b))
        successes.append(log.success_rate_pct)
    return CellResult(
        omega_a=omega_a,
        omega_b=omega_b,
        profit_a=tuple(profits_a),
        profit_b=tuple(profits_b),
        total=tuple(totals),
        success_rate_pct=tuple(successes),
    )


def _cell_task(args) -> CellResult:
    spec, omega_a, omega_b, cell_index = args
    seqs = _cell_seed_seqs(spec.base.seed, cell_index, spec.replications)
    return run_cell(spec, omega_a, omega_b, seqs)


def run_test(spec: ExperimentSpec, out_dir=None, force: bool = False) -> SweepSummary:
    """Run a whole sweep; optionally write its cells and summary CSV files."""
    spec.validate()
    tasks = [(spec, wa, wb, i) for i, (wa, wb) in enumerate(spec.cells())]
    workers = int(os.environ.get("NDG_THREADS", "1") or "1")
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            cells = tuple(pool.map(_cell_task, tasks))
    else:
        cells = tuple(_cell_task(t) for t in tasks)
    result = SweepSummary(spec=spec, cells=cells, summary=aggregate(cells))
    if out_dir is not None:
        from pathlib import Path

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cells_path = out / f"test{spec.test_id}_cells.csv"
        summary_path = out / f"test{spec.test_id}_summary.csv"
        for p in (cells_path, summary_path):
            if p.exists() and not force:
                raise FileExistsError(f"refusing to overwrite {p} (use force)")
        write_cells_csv(result, cells_path)
        write_summary_csv(result, summary_path)
    return result


def aggregate(cells) -> dict:
    """Min/mean/max over cells of the per-cell replication means.

    Each statistic is taken per metric independently, so e.g. the minimum
    profits of the two players may come from different cells and need not
    add up to the minimum total.
    """
    cells = list(cells)
    if not cells:
        raise ValueError("no cells to aggregate")
    means = {m: np.array([c.rep_mean(m) for c in cells]) for m in METRICS}
    return {
        "min": {m: float(v.min()) for m, v in means.items()},
        "mean": {m: float(v.mean()) for m, v in means.items()},
        "max": {m: float(v.max()) for m, v in means.items()},
    }


# === CSV serialization ===


def _cells_header() -> list[str]:
    header = ["omega_a", "omega_b"]
    for m in METRICS:
        header += [f"{m}_mean", f"{m}_min", f"{m}_max"]
    return header


def write_cells_csv(result: SweepSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_cells_header())
        for c in result.cells:
            row = [c.omega_a, c.omega_b]
            for m in METRICS:
                v = c.rep_values(m)
                row += [c.rep_mean(m), float(v.min()), float(v.max())]
            writer.writerow(row)


def read_cells_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if (reader.fieldnames or []) != _cells_header():
            raise ValueError(f"unexpected cells CSV header in {path}")
        return [{k: float(v) for k, v in row.items()} for row in reader]


def write_summary_csv(result: SweepSummary, path) -> None:
    """Three-row table (min/mean/max) with fixed two-decimal formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", *METRICS])
        for stat in ("min", "mean", "max"):
            writer.writerow([stat] + [f"{result.summary[stat][m]:.2f}" for m in METRICS])


def read_summary_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if (reader.fieldnames or []) != ["statistic", *METRICS]:
            raise ValueError(f"unexpected summary CSV header in {path}")
        out = {}
        for row in reader:
            out[row["statistic"]] = {m: float(row[m]) for m in METRICS}
    return out
