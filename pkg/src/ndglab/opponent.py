"""Models of the other player's next demand.

Three families, all conditional on the pair of previous-round demands:

* a rule-based model of human-like play: a Gaussian kernel discretized
  over the demand grid, centred on a simple adjustment of the modelled
  player's previous demand;
* the uninformed uniform model;
* a count-based conjugate learner whose per-context row means form the
  current point estimate of the opponent's demand distribution.

Distributions are plain numpy vectors of length ``q - 1`` where entry
``i`` is the probability of demand ``i + 1``.  Full conditional tables
have shape ``(q - 1, q - 1, q - 1)`` indexed by
``[prev_a - 1, prev_b - 1, demand - 1]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import GameLog, JointState, Role, check_demand, seat_view

__all__ = [
    "HeuristicModel",
    "holds_previous_demand",
    "proportional_mean",
    "heuristic_mean",
    "heuristic_distribution",
    "heuristic_sample",
    "heuristic_table",
    "uniform_model",
    "uniform_table",
    "DirichletLearner",
    "make_prior",
    "save_learner",
    "load_learner",
]


@dataclass(frozen=True)
class HeuristicModel:
    """Discretized-Gaussian demand model with spread ``sigma``."""

    sigma: float
    q: int

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")


def holds_previous_demand(own_prev: int, opp_prev: int, q: int) -> bool:
    """True when the modelled player repeats its demand instead of adjusting.

    That happens after an incompatible round in which its own demand was at
    most half of ``q``: the failure was the opponent's overreach, so the
    modelled player stays put rather than conceding further.
    """
    return 2 * own_prev <= q and own_prev + opp_prev > q


def proportional_mean(own_prev: int, opp_prev: int, q: int) -> float:
    """Previous demand adjusted by a proportional share of the leftover.

    ``own + own / (own + opp) * (q - own - opp)``; negative leftover (an
    incompatible round) pulls the mean down.  Applied to both seats of the
    same state the two means always add up to exactly ``q``.
    """
    leftover = q - own_prev - opp_prev
    return own_prev + own_prev / (own_prev + opp_prev) * leftover


def heuristic_mean(own_prev: int, opp_prev: int, q: int) -> float:
    if holds_previous_demand(own_prev, opp_prev, q):
        return float(own_prev)
    return proportional_mean(own_prev, opp_prev, q)


def heuristic_distribution(model: HeuristicModel, s: JointState, role: Role) -> np.ndarray:
    """Distribution of ``role``'s next demand under the rule-based model.

    A Gaussian kernel ``exp(-(d - mu)^2 / (2 sigma^2))`` evaluated on the
    demand grid ``1..q-1`` and normalized; the mean ``mu`` is not rounded.
    """
    own_prev, opp_prev = seat_view(s, role)
    check_demand(own_prev, model.q, "own_prev")
    check_demand(opp_prev, model.q, "opp_prev")
    mu = heuristic_mean(own_prev, opp_prev, model.q)
    support = np.arange(1, model.q)
    log_w = -((support - mu) ** 2) / (2.0 * model.sigma**2)
    log_w -= log_w.max()  # largest weight becomes 1: immune to underflow at tiny sigma
    weights = np.exp(log_w)
    return weights / weights.sum()


def heuristic_sample(
    model: HeuristicModel, s: JointState, role: Role, rng: np.random.Generator
) -> int:
    """Draw one demand from the rule-based model by inverse CDF."""
    probs = heuristic_distribution(model, s, role)
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(idx, model.q - 2) + 1


def heuristic_table(model: HeuristicModel, role: Role) -> np.ndarray:
    """Full conditional table of ``role``'s next demand for every state."""
    n = model.q - 1
    table = np.empty((n, n, n))
    for prev_a in range(1, model.q):
        for prev_b in range(1, model.q):
            table[prev_a - 1, prev_b - 1] = heuristic_distribution(
                model, JointState(prev_a, prev_b), role
            )
    return table


def uniform_model(q: int) -> np.ndarray:
    """The context-free uniform distribution over demands ``1..q-1``."""
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    return np.full(q - 1, 1.0 / (q - 1))


def uniform_table(q: int) -> np.ndarray:
    """Uniform conditional table: every context gets the uniform row."""
    n = q - 1
    if n < 1:
        raise ValueError(f"q must be at least 2, got {q}")
    return np.full((n, n, n), 1.0 / n)


class DirichletLearner:
    """Per-context positive counts over the opponent's next demand.

    ``counts[prev_a - 1, prev_b - 1, d - 1]`` is the pseudo-count of demand
    ``d`` in context ``(prev_a, prev_b)``.  Normalizing a row gives the
    point estimate; adding one to a cell is the whole belief update, so any
    permutation of the same observations lands on the same estimate.
    """

    def __init__(self, counts: np.ndarray, q: int):
        counts = np.asarray(counts, dtype=float)
        n = q - 1
        if counts.shape != (n, n, n):
            raise ValueError(
                f"counts must have shape {(n, n, n)} for q={q}, got {counts.shape}"
            )
        if not np.all(counts > 0):
            raise ValueError("all counts must stay strictly positive")
        self.counts = counts
        self.q = q
        self.version = 0  # bumped on every update; lets planners cache per belief state

    @classmethod
    def uniform(cls, q: int) -> "DirichletLearner":
        n = q - 1
        return cls(np.ones((n, n, n)), q)

    def update(self, context: JointState, observed: int) -> None:
        """Record one observed demand in one context."""
        check_demand(context.prev_a, self.q, "context.prev_a")
        check_demand(context.prev_b, self.q, "context.prev_b")
        check_demand(observed, self.q, "observed")
        self.counts[context.prev_a - 1, context.prev_b - 1, observed - 1] += 1.0
        self.version += 1

    def estimate(self, context: JointState) -> np.ndarray:
        """Point estimate of the opponent's demand distribution in ``context``."""
        check_demand(context.prev_a, self.q, "context.prev_a")
        check_demand(context.prev_b, self.q, "context.prev_b")
        row = self.counts[context.prev_a - 1, context.prev_b - 1]
        return row / row.sum()

    def estimate_table(self) -> np.ndarray:
        """Point estimates for every context at once."""
        return self.counts / self.counts.sum(axis=-1, keepdims=True)

    def total_mass(self) -> float:
        return float(self.counts.sum())

    def copy(self) -> "DirichletLearner":
        clone = DirichletLearner(self.counts.copy(), self.q)
        clone.version = self.version
        return clone


def make_prior(
    kind: str,
    q: int,
    *,
    sigma: float | None = None,
    training_log: GameLog | None = None,
    opponent: Role = Role.B,
) -> DirichletLearner:
    """Build a learner's starting counts.

    Args:
        kind: ``"uniform"`` puts one pseudo-count on every cell.
            ``"heuristic"`` shapes each context row like the rule-based
            distribution with the given ``sigma``, scaled to row mass
            ``q - 1`` so it is exactly as weak as the uniform prior.
            ``"pretrained"`` starts uniform and replays one update per
            round of ``training_log``.
        q: amount being split; fixes the table dimensions.
        sigma: spread for the heuristic prior.
        training_log: source game for the pretrained prior.
        opponent: which seat is being modelled; decides the heuristic
            role mapping and whose demands are read from the log.
    """
    if kind == "uniform":
        return DirichletLearner.uniform(q)
    if kind == "heuristic":
        if sigma is None:
            raise ValueError("heuristic prior needs sigma")
        table = heuristic_table(HeuristicModel(sigma=sigma, q=q), opponent)
        return DirichletLearner(table * (q - 1), q)
    if kind == "pretrained":
        learner = DirichletLearner.uniform(q)
        if training_log is None or not training_log.records:
            warnings.warn("empty training log: falling back to the uniform prior")
            return learner
        if training_log.config.q != q:
            raise ValueError(
                f"training log was played with q={training_log.config.q}, expected {q}"
            )
        for state, rec in zip(training_log.round_states(), training_log.records):
            observed = rec.demand_b if opponent is Role.B else rec.demand_a
            learner.update(state, observed)
        return learner
    raise ValueError(f"unknown prior kind {kind!r}")


def save_learner(learner: DirichletLearner, path) -> None:
    """Write counts as plain text: one ``prev_a prev_b v1 .. v_{q-1}`` row per context."""
    lines = []
    for prev_a in range(1, learner.q):
        for prev_b in range(1, learner.q):
            row = learner.counts[prev_a - 1, prev_b - 1]
            cells = [str(prev_a), str(prev_b)] + [repr(float(v)) for v in row]
            lines.append(" ".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def load_learner(path) -> DirichletLearner:
    """Read counts written by :func:`save_learner`; q is inferred from the row width."""
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    if not rows:
        raise ValueError(f"no learner rows found in {path}")
    q = len(rows[0]) - 2 + 1
    n = q - 1
    if n < 1 or len(rows) != n * n:
        raise ValueError(f"expected {n * n} rows of width {n + 2} in {path}")
    counts = np.empty((n, n, n))
    for cells in rows:
        if len(cells) != n + 2:
            raise ValueError(f"ragged learner row in {path}")
        prev_a, prev_b = int(cells[0]), int(cells[1])
        check_demand(prev_a, q, "prev_a")
        check_demand(prev_b, q, "prev_b")
        counts[prev_a - 1, prev_b - 1] = [float(v) for v in cells[2:]]
    return DirichletLearner(counts, q)
