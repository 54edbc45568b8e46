"""Independent reference implementations used to cross-check the package.

Everything here is plain-Python scalar arithmetic (math.exp, dict memos,
explicit loops) so that a bug in the vectorized production code cannot
hide in a mirror image of itself.
"""

import itertools
import math

import numpy as np


def scalar_reward(a, b, omega, q):
    ok = 1 if a + b <= q else 0
    return a * (1.0 - omega) * ok - omega * abs(q - (a + b))


def gaussian_row(mu, sigma, q):
    """Discretized Gaussian over demands 1..q-1, normalized by direct summation."""
    weights = [math.exp(-((b - mu) ** 2) / (2.0 * sigma * sigma)) for b in range(1, q)]
    z = sum(weights)
    return [w / z for w in weights]


def table_prob(table):
    """Adapt a (q-1, q-1, q-1) conditional table to a scalar lookup."""
    return lambda own, opp, b: float(table[own - 1, opp - 1, b - 1])


def one_step_action_values(prob, omega, q, own_prev, opp_prev):
    return [
        sum(prob(own_prev, opp_prev, b) * scalar_reward(a, b, omega, q) for b in range(1, q))
        for a in range(1, q)
    ]


def tree_value(prob, omega, h, q, own_prev, opp_prev):
    """Maximum expected h-step reward over all closed-loop policies.

    Exhaustive scalar recursion with memoization on (state, stages left);
    interchanging max and expectation over disjoint branches makes this
    equal to the best deterministic policy's value.
    """
    memo = {}

    def best(own, opp, k):
        if k == 0:
            return 0.0
        key = (own, opp, k)
        if key not in memo:
            top = -math.inf
            for a in range(1, q):
                total = 0.0
                for b in range(1, q):
                    p = prob(own, opp, b)
                    if p > 0.0:
                        total += p * (scalar_reward(a, b, omega, q) + best(a, b, k - 1))
                top = max(top, total)
            memo[key] = top
        return memo[key]

    return best(own_prev, opp_prev, h)


def policy_value(prob, policy, omega, h, q, own_prev, opp_prev):
    """Expected h-step reward of a fixed stage policy.

    ``policy[k]`` maps (own_prev, opp_prev) to the demand played when k
    stages remain.
    """
    memo = {}

    def walk(own, opp, k):
        if k == 0:
            return 0.0
        key = (own, opp, k)
        if key not in memo:
            a = policy[k][(own, opp)]
            total = 0.0
            for b in range(1, q):
                p = prob(own, opp, b)
                if p > 0.0:
                    total += p * (scalar_reward(a, b, omega, q) + walk(a, b, k - 1))
            memo[key] = total
        return memo[key]

    return walk(own_prev, opp_prev, h)


def exhaustive_policy_max(prob, omega, h, q, own_prev, opp_prev):
    """Literal maximum over every deterministic stage policy.  Tiny q only."""
    states = [(i, j) for i in range(1, q) for j in range(1, q)]
    stage_rules = [
        dict(zip(states, combo))
        for combo in itertools.product(range(1, q), repeat=len(states))
    ]
    best = -math.inf
    for rules in itertools.product(stage_rules, repeat=h):
        policy = {k: rules[k - 1] for k in range(1, h + 1)}
        best = max(best, policy_value(prob, policy, omega, h, q, own_prev, opp_prev))
    return best


def random_model(rng, q):
    """Random conditional table with strictly positive normalized rows."""
    n = q - 1
    raw = rng.random((n, n, n)) + 1e-3
    return raw / raw.sum(axis=-1, keepdims=True)


def bootstrap_lower(diffs, n_boot=10_000, seed=0, alpha=0.05):
    """One-sided lower confidence bound for the mean of paired differences."""
    rng = np.random.default_rng(seed)
    diffs = np.asarray(diffs, dtype=float)
    idx = rng.integers(0, len(diffs), size=(n_boot, len(diffs)))
    return float(np.quantile(diffs[idx].mean(axis=1), alpha))
