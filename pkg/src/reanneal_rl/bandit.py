"""Multi-armed bandit regret simulation for three exploration regimes.

Greedy (eps=0) can lock onto a suboptimal arm forever (linear regret);
constant-eps keeps paying eps * mean-gap per step (also linear); the decaying
schedule eps_t = min(1, c / (gap^2 * t)) grows only logarithmically. Regret
is accumulated against the true arm means, not the noisy rewards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BanditSpec:
    arm_means: np.ndarray
    noise_std: float = 0.1
    horizon: int = 100_000

    def __post_init__(self):
        self.arm_means = np.asarray(self.arm_means, dtype=float)
        if self.arm_means.shape[0] < 2:
            raise ValueError("need at least 2 arms")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass
class RegretCurve:
    cumulative_regret: np.ndarray


@dataclass
class Greedy:
    pass


@dataclass
class ConstantEps:
    epsilon: float

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


@dataclass
class DecayingEps:
    """eps_t = min(1, c / (gap^2 * t)); uses the true gap, which is known in
    simulation even though it is not in practice."""

    c: float = 10.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")


def gap(spec):
    """Best arm mean minus second-best arm mean."""
    top_two = np.sort(spec.arm_means)[-2:]
    g = float(top_two[1] - top_two[0])
    if g == 0.0:
        raise ValueError("degenerate spec: no unique best arm (zero gap)")
    return g


def run_bandit(spec, strategy, rng):
    """Simulate one bandit run; returns the cumulative expected regret curve.

    Value estimates are incremental sample means initialized at zero. The
    per-step regret is best-mean minus the true mean of the pulled arm.
    """
    n_arms = spec.arm_means.shape[0]
    best_mean = float(spec.arm_means.max())
    estimates = np.zeros(n_arms)
    pulls = np.zeros(n_arms, dtype=np.int64)
    if isinstance(strategy, DecayingEps):
        gap_sq = gap(spec) ** 2
    regret = np.empty(spec.horizon)
    total = 0.0
    for t in range(1, spec.horizon + 1):
        if isinstance(strategy, Greedy):
            eps = 0.0
        elif isinstance(strategy, ConstantEps):
            eps = strategy.epsilon
        elif isinstance(strategy, DecayingEps):
            eps = min(1.0, strategy.c / (gap_sq * t))
        else:
            raise TypeError(f"unknown strategy {strategy!r}")
        if eps > 0.0 and rng.random() < eps:
            arm = int(rng.integers(0, n_arms))
        else:
            arm = int(np.argmax(estimates))
        reward = spec.arm_means[arm]
        if spec.noise_std > 0.0:
            reward += spec.noise_std * rng.standard_normal()
        pulls[arm] += 1
        estimates[arm] += (reward - estimates[arm]) / pulls[arm]
        total += best_mean - spec.arm_means[arm]
        regret[t - 1] = total
    return RegretCurve(regret)
