"""Finite-horizon lookahead against a demand model, and the agent built on it.

The solver works from the planning player's own seat: a state is the pair
``(own_prev, opp_prev)`` and the model gives the opponent's next demand
conditional on that pair.  One stage scores action ``a`` at state ``s`` as
the model-expected reward plus the value of the landing state ``(a, b)``;
values roll back from a zero terminal stage:

    V_0 = 0
    Q_k(s, a) = sum_b model(b | s) * (reward(a, b) + V_{k-1}(a, b))
    V_k(s)    = max_a Q_k(s, a)

The opponent's demand depends on the current state only, so the own action
deterministically becomes the first component of the next state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import JointState, Role, reward, reward_matrix, seat_view

__all__ = [
    "ValueTable",
    "DecisionRule",
    "backward_induction",
    "brute_force_value",
    "MdpAgent",
    "write_value_table_csv",
    "write_decision_rule_csv",
]

TIE_BREAKS = ("smallest", "random")


@dataclass(frozen=True)
class ValueTable:
    """Stage values ``values[k, own_prev - 1, opp_prev - 1]`` for k = 0..h."""

    values: np.ndarray
    q: int
    h: int


@dataclass(frozen=True)
class DecisionRule:
    """First-stage optimal demand per state: ``actions[own_prev - 1, opp_prev - 1]``."""

    actions: np.ndarray
    q: int

    def demand_at(self, own_prev: int, opp_prev: int) -> int:
        return int(self.actions[own_prev - 1, opp_prev - 1])


def _validate_model(model: np.ndarray, q: int) -> np.ndarray:
    n = q - 1
    model = np.asarray(model, dtype=float)
    if model.shape != (n, n, n):
        raise ValueError(f"model must have shape {(n, n, n)} for q={q}, got {model.shape}")
    if np.any(model < 0) or not np.allclose(model.sum(axis=-1), 1.0, atol=1e-9):
        raise ValueError("every model row must be a distribution over demands")
    return model


def backward_induction(
    model: np.ndarray,
    omega: float,
    h: int,
    q: int,
    *,
    tie_break: str = "smallest",
    rng: np.random.Generator | None = None,
    rewards: np.ndarray | None = None,
) -> tuple[ValueTable, DecisionRule]:
    """Solve the h-stage lookahead and return values plus the first-stage rule.

    Args:
        model: conditional table ``model[own_prev-1, opp_prev-1, b-1]`` of the
            opponent's next demand, every row a distribution.
        omega: reward weight of the planning player.
        h: number of stages, at least 1.
        q: amount being split.
        tie_break: ``"smallest"`` keeps the lowest maximizing demand;
            ``"random"`` draws uniformly among exactly-equal maximizers.
        rng: required for random tie-breaking.
        rewards: optional precomputed ``reward_matrix(omega, q)`` to reuse
            across repeated solves.

    Raises:
        ValueError: on a malformed model, h < 1, or a bad tie-break setup.
    """
    if h < 1:
        raise ValueError(f"horizon must be at least 1, got {h}")
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
    if tie_break == "random" and rng is None:
        raise ValueError("random tie-breaking needs an rng")
    model = _validate_model(model, q)
    n = q - 1
    gains = reward_matrix(omega, q) if rewards is None else np.asarray(rewards, dtype=float)
    flat_model = model.reshape(n * n, n)

    values = np.zeros((h + 1, n, n))
    q_vals = None
    for k in range(1, h + 1):
        landing = gains + values[k - 1]  # total gain of finishing the stage at (a, b)
        q_vals = flat_model @ landing.T  # (state, action)
        values[k] = q_vals.max(axis=1).reshape(n, n)

    actions = q_vals.argmax(axis=1)  # first maximum = smallest maximizing demand
    if tie_break == "random":
        for i in range(n * n):
            row = q_vals[i]
            ties = np.flatnonzero(row == row.max())
            if len(ties) > 1:
                actions[i] = rng.choice(ties)
    rule = DecisionRule(actions=(actions + 1).reshape(n, n).astype(int), q=q)
    return ValueTable(values=values, q=q, h=h), rule


def brute_force_value(
    model: np.ndarray, omega: float, h: int, q: int, state: tuple[int, int]
) -> float:
    """Best expected total reward from ``state`` with ``h`` stages to go.

    Plain scalar recursion over every action choice and every opponent
    reply, written independently of the vectorized solver as a cross-check.
    Exponential in ``h``; meant for small instances only.
    """
    model = _validate_model(model, q)

    def best(own_prev: int, opp_prev: int, stages: int) -> float:
        if stages == 0:
            return 0.0
        row = model[own_prev - 1, opp_prev - 1]
        best_val = -np.inf
        for a in range(1, q):
            total = 0.0
            for b in range(1, q):
                p = row[b - 1]
                if p == 0.0:
                    continue
                total += p * (reward(a, b, omega, q) + best(a, b, stages - 1))
            best_val = max(best_val, total)
        return best_val

    own, opp = state
    return best(own, opp, h)


class MdpAgent:
    """Lookahead player: plans ``horizon`` stages against its demand model.

    With a learner attached, the model estimate is refreshed and the plan
    recomputed whenever the belief changes (receding horizon); with a fixed
    model the decision rule is solved once and cached.  Exactly one of
    ``model`` (a fixed conditional table) and ``learner`` must be given.
    """

    def __init__(
        self,
        role: Role,
        omega: float,
        horizon: int,
        q: int,
        *,
        model: np.ndarray | None = None,
        learner=None,
        tie_break: str = "smallest",
    ):
        if (model is None) == (learner is None):
            raise ValueError("pass exactly one of model= (fixed) or learner=")
        if not 0.0 <= omega <= 1.0:
            raise ValueError(f"omega must lie in [0, 1], got {omega}")
        if horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {horizon}")
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
        if learner is not None and learner.q != q:
            raise ValueError(f"learner was built for q={learner.q}, agent needs q={q}")
        self.role = role
        self.omega = float(omega)
        self.horizon = horizon
        self.q = q
        self.learner = learner
        self._model = _validate_model(model, q) if model is not None else None
        self.tie_break = tie_break
        self.rng: np.random.Generator | None = None
        self._rewards = reward_matrix(omega, q)
        self._rule: DecisionRule | None = None
        self._rule_version: int | None = None

    @property
    def learning(self) -> bool:
        return self.learner is not None

    def bind_rng(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def _seat_table(self) -> np.ndarray:
        table = self.learner.estimate_table() if self.learning else self._model
        if self.role is Role.A:
            return table
        return table.transpose(1, 0, 2)  # swap context axes into (own, opp) order

    def current_rule(self) -> DecisionRule:
        version = self.learner.version if self.learning else 0
        if version != self._rule_version:
            _, self._rule = backward_induction(
                self._seat_table(),
                self.omega,
                self.horizon,
                self.q,
                tie_break=self.tie_break,
                rng=self.rng,
                rewards=self._rewards,
            )
            self._rule_version = version
        return self._rule

    def act(self, state: JointState) -> int:
        own_prev, opp_prev = seat_view(state, self.role)
        return self.current_rule().demand_at(own_prev, opp_prev)

    def observe(self, state: JointState, opponent_demand: int) -> None:
        if self.learning:
            self.learner.update(state, opponent_demand)


def write_value_table_csv(table: ValueTable, path) -> None:
    """Dump stage values; state columns are in the planner's seat order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "prev_a", "prev_b", "value"])
        for k in range(table.h + 1):
            for own in range(1, table.q):
                for opp in range(1, table.q):
                    writer.writerow([k, own, opp, repr(float(table.values[k, own - 1, opp - 1]))])


def write_decision_rule_csv(rule: DecisionRule, path) -> None:
    """Dump the first-stage rule; state columns are in the planner's seat order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["prev_a", "prev_b", "action"])
        for own in range(1, rule.q):
            for opp in range(1, rule.q):
                writer.writerow([own, opp, rule.demand_at(own, opp)])
