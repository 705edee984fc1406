"""Gaussian semi-bandit environment, MLE bookkeeping and confidence hyperboxes.

Observations are kept as {arm: value} dicts rather than zero-filled vectors so
that an observed reward of exactly 0 stays distinguishable from "not observed".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BanditInstance",
    "EstimatorState",
    "ConfidenceBox",
    "sample_feedback",
    "update_estimator",
    "kl_gaussian",
    "kl_gaussian_vec",
    "confidence_box",
    "project_to_box",
]


@dataclass
class BanditInstance:
    """True parameters of a Gaussian semi-bandit.

    parameter_box, when present, is a (2, d) array of per-arm [lower, upper]
    bounds on the mean; None means the unbounded Gaussian case.
    """

    means: np.ndarray
    stddevs: np.ndarray
    family: str = "gaussian"
    parameter_box: np.ndarray | None = None

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=float)
        self.stddevs = np.asarray(self.stddevs, dtype=float)
        if self.means.ndim != 1 or self.means.shape != self.stddevs.shape:
            raise ValueError("means and stddevs must be 1-d arrays of equal length")
        if self.d < 2:
            raise ValueError("need at least 2 arms")
        if np.any(self.stddevs < 0):
            raise ValueError("stddevs must be nonnegative")
        if self.family != "gaussian":
            raise ValueError(f"unsupported family {self.family!r}")
        if self.parameter_box is not None:
            self.parameter_box = np.asarray(self.parameter_box, dtype=float)
            lo, hi = self.parameter_box
            if np.any(self.means < lo) or np.any(self.means > hi):
                raise ValueError("means must lie inside parameter_box")

    @property
    def d(self) -> int:
        return self.means.shape[0]


@dataclass
class EstimatorState:
    """Running counts, reward sums and the per-arm MLE."""

    d: int
    arm_counts: np.ndarray = field(default=None)
    action_counts: dict = field(default_factory=dict)
    reward_sums: np.ndarray = field(default=None)
    mle: np.ndarray = field(default=None)
    round: int = 0

    def __post_init__(self):
        if self.arm_counts is None:
            self.arm_counts = np.zeros(self.d, dtype=np.int64)
        if self.reward_sums is None:
            self.reward_sums = np.zeros(self.d)
        if self.mle is None:
            self.mle = np.zeros(self.d)


def sample_feedback(instance: BanditInstance, action, rng) -> dict:
    """Draw one independent Gaussian observation per arm of `action`."""
    action = tuple(action)
    if len(action) == 0:
        raise ValueError("action must be nonempty")
    idx = np.asarray(action, dtype=np.intp)
    if idx.min() < 0 or idx.max() >= instance.d:
        raise ValueError(f"arm index out of range for d={instance.d}")
    sig = instance.stddevs[idx]
    draws = instance.means[idx] + sig * rng.standard_normal(len(action))
    return dict(zip(action, draws))


def update_estimator(state: EstimatorState, action, observation: dict) -> EstimatorState:
    """Fold one semi-bandit observation into counts, sums and the MLE.

    Mutates `state` in place and returns it.
    """
    action = tuple(action)
    if set(observation) != set(action):
        raise ValueError("observation mask does not match action")
    for a in action:
        state.arm_counts[a] += 1
        state.reward_sums[a] += observation[a]
        state.mle[a] = state.reward_sums[a] / state.arm_counts[a]
    key = tuple(sorted(action))
    state.action_counts[key] = state.action_counts.get(key, 0) + 1
    state.round += 1
    return state


def kl_gaussian(x: float, y: float, sigma: float) -> float:
    """KL divergence between N(x, sigma^2) and N(y, sigma^2): (x-y)^2 / (2 sigma^2).

    sigma = 0 is handled as the degenerate limit: 0 if x == y else +inf.
    """
    if sigma == 0.0:
        return 0.0 if x == y else np.inf
    return (x - y) ** 2 / (2.0 * sigma**2)


def kl_gaussian_vec(x, y, sigma):
    """Vectorized kl_gaussian with the same sigma = 0 convention."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (x - y) ** 2 / (2.0 * sigma**2)
    if np.any(sigma == 0.0):
        zero = sigma == 0.0
        out = np.where(zero & (x == y), 0.0, out)
        out = np.where(zero & (x != y), np.inf, out)
    return out


@dataclass
class ConfidenceBox:
    lower: np.ndarray
    upper: np.ndarray


def confidence_box(state: EstimatorState, sigmas, f_value: float) -> ConfidenceBox:
    """Per-arm box mle +- sqrt(2 f sigma^2 / N) around the MLE."""
    if np.any(state.arm_counts < 1):
        raise ValueError("all arms must be observed before building a confidence box")
    if f_value < 0:
        raise ValueError("f_value must be nonnegative")
    sigmas = np.asarray(sigmas, dtype=float)
    half = np.sqrt(2.0 * f_value * sigmas**2 / state.arm_counts)
    return ConfidenceBox(lower=state.mle - half, upper=state.mle + half)


def project_to_box(mle, parameter_box, confidence: ConfidenceBox):
    """Project the MLE onto parameter_box intersected with the confidence box.

    With no parameter_box the projection is the identity.  With a box the
    Gaussian weighted-KL projection is coordinate-wise clipping; when the
    intersection is empty in some coordinate the parameter_box endpoint
    nearest the confidence box is used (deterministic).
    """
    mle = np.asarray(mle, dtype=float)
    if parameter_box is None:
        return mle
    lo = np.maximum(parameter_box[0], confidence.lower)
    hi = np.minimum(parameter_box[1], confidence.upper)
    out = np.clip(mle, lo, hi)
    empty = lo > hi
    if np.any(empty):
        # nearest parameter_box endpoint to the confidence interval
        below = parameter_box[1] < confidence.lower
        out = np.where(empty & below, parameter_box[1], out)
        out = np.where(empty & ~below, parameter_box[0], out)
    return out
