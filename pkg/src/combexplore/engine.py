"""The per-round game loop: recommendation, stopping, tracking, best response.

Round structure (after initialization): recommend a candidate answer, check
the likelihood-ratio stopping rule, obtain weights from the learner, convert
them into an action via tracking, compute the adversary's closed-form best
response, build the optimistic reward, feed the learner, then sample and
update the estimator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bandit import (
    BanditInstance,
    EstimatorState,
    confidence_box,
    project_to_box,
    sample_feedback,
    update_estimator,
)
from .learners import covering_initialization, make_learner
from .structures import incidence, polytope_params
from .thresholds import (
    ThresholdContext,
    exploration_bonus,
    max_symmetric_difference,
    stopping_threshold,
)

__all__ = [
    "GameConfig",
    "RunResult",
    "recommend",
    "best_response_gaussian",
    "best_response_value",
    "lambda_player",
    "glr_statistic",
    "optimistic_reward",
    "run_combgame",
]

_SIMPLEX_KINDS = ("hedge", "adahedge", "uniform")


@dataclass
class GameConfig:
    learner_kind: str = "lloo"
    tracking: str = "d_track"
    threshold_mode: str = "stylized"
    bonus_mode: str = "stylized"
    bonus_c: float = 1.0
    bonus_b: float = 1.0
    per_answer_learners: bool = False
    delta: float = 0.1
    reward_mode: str = "gaussian"
    max_rounds: int = 10_000_000
    check_tracking: bool = False
    record_trace: bool = False
    record_support_trace: bool = False
    record_regret: bool = False

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.bonus_c <= 0 or self.bonus_b <= 0:
            raise ValueError("bonus_c and bonus_b must be positive")


@dataclass
class RunResult:
    stopping_time: int
    recommended: tuple
    correct: bool
    budget_exceeded: bool = False
    per_round_nanos_mean: float = 0.0
    mean_support_size: float = 0.0
    rounds_with_wrong_candidate: int = 0
    tracking_violations: int = 0
    support_size_trace: list | None = None
    regret_trace: list | None = None
    trace: list | None = None


def recommend(projected_mle, answer_space) -> tuple:
    """Candidate answer: argmax of the answer oracle at the projected MLE."""
    return tuple(sorted(answer_space.oracle(projected_mle)))


def best_response_gaussian(phi, I, J, weights, sigmas) -> np.ndarray:
    """Closed-form minimizer of <w, d_KL(phi, lambda)> over the half-space
    {<1_J - 1_I, lambda> >= 0}.

    Three cases: phi already feasible (identity); a zero-weight arm in the
    symmetric difference absorbs the whole move for free; otherwise the
    weighted projection spreads the gap over the symmetric difference.
    """
    I = tuple(sorted(I))
    J = tuple(sorted(J))
    if I == J:
        raise ValueError("answers must differ")
    phi = np.asarray(phi, dtype=float)
    weights = np.asarray(weights, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    gap = float(sum(phi[a] for a in J) - sum(phi[a] for a in I))
    if gap >= 0.0:
        return phi.copy()
    sym = sorted(set(I) ^ set(J))
    lam = phi.copy()
    in_J = set(J)
    for a0 in sym:
        if weights[a0] == 0.0:
            s = 1.0 if a0 in in_J else -1.0
            lam[a0] = phi[a0] - s * gap
            return lam
    denom = sum(sigmas[a] ** 2 / weights[a] for a in sym)
    for a in sym:
        s = 1.0 if a in in_J else -1.0
        lam[a] = phi[a] - gap / denom * sigmas[a] ** 2 / weights[a] * s
    return lam


def best_response_value(phi, I, J, weights, sigmas) -> float:
    """Value <w, d_KL(phi, lambda*)> of the closed-form best response.

    Scalar shortcut: 0 if phi is feasible or a zero-weight arm can absorb the
    move, gap^2 / (2 sum sigma^2/w) otherwise (+inf when that sum vanishes).
    """
    gap = 0.0
    for a in J:
        gap += phi[a]
    for a in I:
        gap -= phi[a]
    if gap >= 0.0:
        return 0.0
    denom = 0.0
    for a in set(I) ^ set(J):
        w = weights[a]
        if w == 0.0:
            return 0.0
        denom += sigmas[a] ** 2 / w
    if denom == 0.0:
        return math.inf
    return gap * gap / (2.0 * denom)


def _best_neighbor(phi, I, neighbors, weights, sigmas):
    """(J*, value*) minimizing the best-response value over the neighbor list."""
    if not neighbors:
        raise ValueError("empty neighbor list")
    best_v = math.inf
    best_j = None
    for J in neighbors:
        v = best_response_value(phi, I, J, weights, sigmas)
        if v < best_v:
            best_v = v
            best_j = J
            if v == 0.0:
                break
    return best_j, best_v


def lambda_player(mle, I_t, weights, neighbors, sigmas):
    """Adversary move: most confusing alternative over the neighbor answers."""
    J, value = _best_neighbor(mle, I_t, neighbors, weights, sigmas)
    lam = best_response_gaussian(mle, I_t, J, weights, sigmas)
    return J, lam, value


def glr_statistic(mle, arm_counts, I_t, neighbors, sigmas) -> float:
    """Likelihood-ratio stopping statistic: neighbor min with counts as weights."""
    _, value = _best_neighbor(mle, I_t, neighbors, arm_counts, sigmas)
    return value


def optimistic_reward(box, lam, f_value, arm_counts, sigmas, mode="gaussian") -> np.ndarray:
    """Optimistic per-arm reward for the learner.

    gaussian mode is the closed form (mle-lam)^2/(2 sigma^2) + f/N +
    sqrt(2f/(sigma^2 N)) |mle - lam|; generic mode maximizes the KL over the
    two box corners and floors at f/N.
    """
    arm_counts = np.asarray(arm_counts)
    if np.any(arm_counts < 1):
        raise ValueError("all arms must be observed before computing rewards")
    lam = np.asarray(lam, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    explore = f_value / arm_counts
    if mode == "gaussian":
        mid = 0.5 * (box.lower + box.upper)
        diff = np.abs(mid - lam)
        return diff**2 / (2.0 * sigmas**2) + explore + np.sqrt(2.0 * f_value / (sigmas**2 * arm_counts)) * diff
    if mode == "generic":
        lo = (box.lower - lam) ** 2 / (2.0 * sigmas**2)
        hi = (box.upper - lam) ** 2 / (2.0 * sigmas**2)
        return np.maximum(explore, np.maximum(lo, hi))
    raise ValueError(f"unknown reward mode {mode!r}")


class _Tracker:
    """Cumulative-weight bookkeeping shared by the tracking rules.

    Initialization rounds are recorded as Dirac weights on the played action,
    so counts and cumulative weights start out equal.
    """

    def __init__(self, family_size=None):
        self.cumw = {}
        self.counts = {}
        self.family_size = family_size

    def record_play(self, action):
        self.counts[action] = self.counts.get(action, 0) + 1

    def record_init(self, action):
        self.record_play(action)
        self.cumw[action] = self.cumw.get(action, 0.0) + 1.0

    def add_weights(self, w: dict):
        for A, v in w.items():
            if v > 0.0:
                self.cumw[A] = self.cumw.get(A, 0.0) + v

    def select_c(self):
        best = None
        best_r = math.inf
        for A in sorted(self.cumw):
            r = self.counts.get(A, 0) / self.cumw[A]
            if r < best_r:
                best_r = r
                best = A
        return best

    def select_d(self, w: dict):
        best = None
        best_r = math.inf
        for A in sorted(w):
            v = w[A]
            if v <= 0.0:
                continue
            r = self.counts.get(A, 0) / v
            if r < best_r:
                best_r = r
                best = A
        return best

    def select_direct(self, w: dict, rng):
        actions = sorted(w)
        probs = np.array([w[A] for A in actions])
        probs = probs / probs.sum()
        return actions[int(rng.choice(len(actions), p=probs))]

    def violations(self) -> int:
        size = self.family_size if self.family_size is not None else len(self.cumw)
        lo = 1.0 - size
        bad = 0
        for A, cw in self.cumw.items():
            dev = self.counts.get(A, 0) - cw
            if dev < lo - 1e-9 or dev > 1.0 + 1e-9:
                bad += 1
        return bad


class _ArrayTracker:
    """Tracker aligned with a sparse learner's append-only support arrays.

    Ties in the argmin are broken by support insertion order, which is
    deterministic for a fixed seed.
    """

    def __init__(self, learner, family_size=None):
        n = len(learner.actions)
        self.learner = learner
        # covering initialization played each support action once with a
        # Dirac weight, so counts and cumulative weights start equal
        self.cumw = np.ones(n)
        self.counts = np.ones(n)
        self.family_size = family_size

    def _sync(self):
        n = len(self.learner.actions)
        if n > len(self.cumw):
            grow = n - len(self.cumw)
            self.cumw = np.append(self.cumw, np.zeros(grow))
            self.counts = np.append(self.counts, np.zeros(grow))

    def add_weights(self, w: np.ndarray):
        self._sync()
        self.cumw[: len(w)] += w

    def record_play(self, idx: int):
        self.counts[idx] += 1

    def select_c(self) -> int:
        mask = self.cumw > 0.0
        ratio = np.where(mask, self.counts / np.where(mask, self.cumw, 1.0), math.inf)
        return int(np.argmin(ratio))

    def select_d(self, w: np.ndarray) -> int:
        mask = w > 0.0
        # tiny but positive weights can overflow the division; inf is the
        # correct limit for the ratio either way
        with np.errstate(over="ignore"):
            ratio = np.where(mask, self.counts[: len(w)] / np.where(mask, w, 1.0), math.inf)
        return int(np.argmin(ratio))

    def select_direct(self, w: np.ndarray, rng) -> int:
        return int(rng.choice(len(w), p=w / w.sum()))

    def violations(self) -> int:
        size = self.family_size if self.family_size is not None else len(self.cumw)
        dev = self.counts - self.cumw
        lo = 1.0 - size
        return int(np.sum((dev < lo - 1e-9) | (dev > 1.0 + 1e-9)))


def _learner_factory(config, action_space, polytope, cover):
    def build():
        return make_learner(config.learner_kind, action_space, polytope=polytope, cover=cover)

    return build


def run_combgame(config: GameConfig, instance: BanditInstance, action_space, answer_space, rng) -> RunResult:
    """Run one full identification episode and return its result."""
    if instance.d != action_space.d or instance.d != answer_space.d:
        raise ValueError("dimension mismatch between instance and spaces")
    sigmas = instance.stddevs
    expected = recommend(instance.means, answer_space)
    ctx = ThresholdContext(
        d0=max_symmetric_difference(answer_space.answers),
        K=action_space.max_action_size,
        answer_count=len(answer_space.answers),
        mode=config.threshold_mode,
    )
    needs_polytope = config.learner_kind in ("ofw", "lloo")
    polytope = polytope_params(action_space) if needs_polytope else None
    if config.learner_kind in ("hedge", "adahedge"):
        init_actions = list(action_space.enumerator)
        cover = None
    else:
        cover = covering_initialization(action_space)
        init_actions = list(cover)
    build = _learner_factory(config, action_space, polytope, cover)
    learners = {}
    shared_learner = None if config.per_answer_learners else build()

    state = EstimatorState(d=instance.d)
    family_size = len(action_space.enumerator) if action_space.enumerator is not None else None
    sparse_mode = shared_learner is not None and hasattr(shared_learner, "weights_arrays")
    if sparse_mode:
        tracker = _ArrayTracker(shared_learner, family_size=family_size)
    else:
        tracker = _Tracker(family_size=family_size)
    for action in init_actions:
        obs = sample_feedback(instance, action, rng)
        update_estimator(state, action, obs)
        if not sparse_mode:
            tracker.record_init(tuple(sorted(action)))
    n0 = state.round

    wrong_candidate = 0
    violations = 0
    nanos_sum = 0
    nanos_n = 0
    support_sum = 0
    support_trace = [] if config.record_support_trace else None
    regret_trace = [] if config.record_regret else None
    trace = [] if config.record_trace else None
    if config.record_regret:
        if action_space.enumerator is None:
            raise ValueError("regret recording needs an enumerable action space")
        inc_matrix = np.stack([incidence(a, instance.d) for a in action_space.enumerator])
        cum_u = np.zeros(len(action_space.enumerator))
        cum_mix = 0.0

    neighbors_cache = {}
    while True:
        t = state.round + 1
        if t > config.max_rounds:
            return RunResult(
                stopping_time=state.round,
                recommended=recommend(state.mle, answer_space),
                correct=False,
                budget_exceeded=True,
                per_round_nanos_mean=nanos_sum / max(nanos_n, 1),
                mean_support_size=support_sum / max(nanos_n, 1),
                rounds_with_wrong_candidate=wrong_candidate,
                tracking_violations=violations,
                support_size_trace=support_trace,
                regret_trace=regret_trace,
                trace=trace,
            )
        f_prev = exploration_bonus(t - 1, config.bonus_mode, config.bonus_c, config.bonus_b)
        if instance.parameter_box is None:
            projected = state.mle
        else:
            box0 = confidence_box(state, sigmas, f_prev)
            projected = project_to_box(state.mle, instance.parameter_box, box0)
        I_t = recommend(projected, answer_space)
        if I_t != expected:
            wrong_candidate += 1
        if I_t not in neighbors_cache:
            neighbors_cache[I_t] = answer_space.neighbors(I_t)
        neighbors = neighbors_cache[I_t]
        stat = glr_statistic(state.mle, state.arm_counts, I_t, neighbors, sigmas)
        beta = stopping_threshold(t - 1, config.delta, ctx)
        if stat > beta:
            return RunResult(
                stopping_time=state.round,
                recommended=I_t,
                correct=I_t == expected,
                per_round_nanos_mean=nanos_sum / max(nanos_n, 1),
                mean_support_size=support_sum / max(nanos_n, 1),
                rounds_with_wrong_candidate=wrong_candidate,
                tracking_violations=violations,
                support_size_trace=support_trace,
                regret_trace=regret_trace,
                trace=trace,
            )

        if config.per_answer_learners:
            if I_t not in learners:
                learners[I_t] = build()
            learner = learners[I_t]
        else:
            learner = shared_learner

        tic = time.perf_counter_ns()
        if sparse_mode:
            support, w_arr, point = learner.weights_arrays()
            tracker.add_weights(w_arr)
            if config.tracking == "c_track":
                idx = tracker.select_c()
            elif config.tracking == "d_track":
                idx = tracker.select_d(w_arr)
            elif config.tracking == "direct_sample":
                idx = tracker.select_direct(w_arr, rng)
            else:
                raise ValueError(f"unknown tracking rule {config.tracking!r}")
            A_t = support[idx]
            nanos_sum += time.perf_counter_ns() - tic
            tracker.record_play(idx)
        else:
            w, point, support = learner.weights()
            tracker.add_weights(w)
            if config.tracking == "c_track":
                A_t = tracker.select_c()
            elif config.tracking == "d_track":
                A_t = tracker.select_d(w)
            elif config.tracking == "direct_sample":
                A_t = tracker.select_direct(w, rng)
            else:
                raise ValueError(f"unknown tracking rule {config.tracking!r}")
            nanos_sum += time.perf_counter_ns() - tic
            tracker.record_play(A_t)
        nanos_n += 1
        support_sum += len(support)
        if config.check_tracking and config.tracking == "c_track":
            violations += tracker.violations()

        if config.learner_kind != "uniform":
            _, lam, _ = lambda_player(state.mle, I_t, point, neighbors, sigmas)
            box = confidence_box(state, sigmas, f_prev)
            mode = config.reward_mode if instance.family == "gaussian" else "generic"
            r = optimistic_reward(box, lam, f_prev, state.arm_counts, sigmas, mode=mode)
            if config.record_regret:
                cum_u += inc_matrix @ r
                cum_mix += float(point @ r)
                regret_trace.append(float(cum_u.max() - cum_mix))
            tic = time.perf_counter_ns()
            learner.feed(r)
            nanos_sum += time.perf_counter_ns() - tic

        if support_trace is not None:
            support_trace.append(len(support))
        if trace is not None:
            trace.append((t, A_t, stat, beta, I_t, len(support)))

        obs = sample_feedback(instance, A_t, rng)
        update_estimator(state, A_t, obs)
