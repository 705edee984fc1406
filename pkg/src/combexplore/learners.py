"""No-regret learners for the action player.

Two families:
 - simplex learners (Hedge, AdaHedge, uniform) keep a dense weight per action,
   stored in dicts keyed by action tuple; their per-round cost is honestly
   linear in |A|, which is the point of comparing them against the second
   family;
 - transformed-simplex learners (OFW, LLOO) move a point in conv{1_A} via the
   linear-maximization oracle and keep a sparse simplex representation whose
   support grows by at most one action per step.

Protocol (matching the game loop): weights() returns the current
(w_t, w_tilde_t, B_t) triple, then feed(reward) folds in the round's reward
vector and advances the internal state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .structures import PolytopeParams, incidence

__all__ = [
    "doubling_schedule",
    "covering_initialization",
    "lloo_params",
    "LLOOParams",
    "reduce_support",
    "reduce_take",
    "HedgeLearner",
    "AdaHedgeLearner",
    "UniformLearner",
    "OFWLearner",
    "LLOOLearner",
    "make_learner",
]

_DOUBLING_BASE = (3.0 + math.sqrt(5.0)) / 2.0


def doubling_schedule(i: int) -> int:
    """Epoch horizon floor(200 * ((3+sqrt(5))/2)^i)."""
    if i < 0:
        raise ValueError("epoch index must be >= 0")
    return int(math.floor(200.0 * _DOUBLING_BASE**i))


def covering_initialization(space) -> list:
    """Greedy shortest action sequence observing every arm at least once."""
    uncovered = np.ones(space.d)
    cover = []
    while uncovered.any():
        action = space.oracle(uncovered)
        gained = uncovered[list(action)].sum()
        if gained == 0:
            raise ValueError("oracle cannot cover remaining arms")
        cover.append(tuple(sorted(action)))
        uncovered[list(action)] = 0.0
    return cover


@dataclass
class LLOOParams:
    eta: float
    gamma: float
    mass: float
    horizon: int


def lloo_params(horizon: int, polytope: PolytopeParams, max_reward_norm: float, d: int) -> LLOOParams:
    if min(horizon, max_reward_norm, d) <= 0:
        raise ValueError("all inputs must be positive")
    mu = polytope.mu_poly
    gamma = 1.0 / (3.0 * d * mu**2)
    eta = polytope.diameter / (18.0 * mu * math.sqrt(d * horizon) * max_reward_norm)
    mass = min(mu**2 * d / math.sqrt(horizon) * (1.0 + 1.0 / (18.0 * d * mu**2)), 1.0)
    return LLOOParams(eta=eta, gamma=gamma, mass=mass, horizon=horizon)


def reduce_support(sparse_weights: dict, mass: float, cost, d: int):
    """Strip a total of `mass` from the worst corners of the support.

    Sorts the support by descending <1_A, cost>, takes whole weights until the
    cumulative mass would exceed `mass`, and gives the last action the
    residual.  Returns (arm-level vector, sparse action distribution).
    """
    total = sum(sparse_weights.values())
    if mass > total + 1e-12:
        raise ValueError("mass exceeds total weight of the support")
    if not sparse_weights:
        raise ValueError("empty support")
    cost = np.asarray(cost, dtype=float)
    scored = sorted(
        sparse_weights.items(),
        key=lambda kv: (-sum(cost[a] for a in kv[0]), kv[0]),
    )
    out = {}
    remaining = mass
    for action, w in scored:
        if remaining <= 0:
            break
        take = min(w, remaining)
        if take > 0:
            out[action] = take
        remaining -= take
    vec = np.zeros(d)
    for action, w in out.items():
        for a in action:
            vec[a] += w
    return vec, out


class HedgeLearner:
    """Exponential weights over the explicit action list, doubling trick.

    The epoch's learning rate is sqrt(8 ln|A| / T_epoch) / scale, where scale
    is the running max of the per-round loss range, carried over across epochs
    (1.0 before any feedback).
    """

    def __init__(self, actions, d: int):
        self.actions = [tuple(sorted(a)) for a in actions]
        self.d = d
        self.n = len(self.actions)
        self._scale = 1.0
        self._epoch = 0
        self._start_epoch()

    def _start_epoch(self):
        self.L = {A: 0.0 for A in self.actions}
        self.t_epoch = 0
        self.horizon = doubling_schedule(self._epoch)
        self.eta = math.sqrt(8.0 * math.log(self.n) / self.horizon) / self._scale

    def weights(self):
        mn = min(self.L.values())
        w = {}
        z = 0.0
        for A, L in self.L.items():
            v = math.exp(-self.eta * (L - mn))
            w[A] = v
            z += v
        point = np.zeros(self.d)
        for A, v in w.items():
            w[A] = v / z
            for a in A:
                point[a] += w[A]
        return w, point, list(w)

    def feed(self, reward):
        hi = -math.inf
        lo = math.inf
        for A in self.actions:
            u = sum(reward[a] for a in A)
            self.L[A] -= u
            if u > hi:
                hi = u
            if u < lo:
                lo = u
        self._scale = max(self._scale, hi - lo)
        self.t_epoch += 1
        if self.t_epoch >= self.horizon:
            self._epoch += 1
            self._start_epoch()


class AdaHedgeLearner:
    """AdaHedge: anytime exponential weights with rate ln|A| / cumulative gap.

    The infinite initial rate acts as follow-the-leader with uniform
    tie-breaking over the loss minimizers.
    """

    def __init__(self, actions, d: int):
        self.actions = [tuple(sorted(a)) for a in actions]
        self.d = d
        self.n = len(self.actions)
        self.L = {A: 0.0 for A in self.actions}
        self.gap_sum = 0.0
        self._last_w = None

    @property
    def eta(self):
        if self.gap_sum <= 0.0:
            return math.inf
        return math.log(self.n) / self.gap_sum

    def weights(self):
        eta = self.eta
        w = {}
        if math.isinf(eta):
            mn = min(self.L.values())
            leaders = [A for A, L in self.L.items() if L == mn]
            for A in self.actions:
                w[A] = 1.0 / len(leaders) if A in leaders else 0.0
        else:
            mn = min(self.L.values())
            z = 0.0
            for A, L in self.L.items():
                v = math.exp(-eta * (L - mn))
                w[A] = v
                z += v
            for A in w:
                w[A] /= z
        self._last_w = w
        point = np.zeros(self.d)
        for A, v in w.items():
            for a in A:
                point[a] += v
        return w, point, [A for A, v in w.items() if v > 0]

    def feed(self, reward):
        if self._last_w is None:
            self.weights()
        w = self._last_w
        eta = self.eta
        losses = {}
        for A in self.actions:
            losses[A] = -sum(reward[a] for a in A)
        expected = sum(w[A] * losses[A] for A in self.actions)
        if math.isinf(eta):
            mix = -min(losses[A] for A in self.actions if w[A] > 0)
        else:
            mn = min(losses.values())
            z = sum(w[A] * math.exp(-eta * (losses[A] - mn)) for A in self.actions)
            mix = (math.log(z) - eta * mn) / eta
        gap = expected + mix
        self.gap_sum += max(gap, 0.0)
        for A, L in losses.items():
            self.L[A] += L
        self._last_w = None


class UniformLearner:
    """Constant uniform weights over the enumerated actions."""

    def __init__(self, actions, d: int):
        self.actions = [tuple(sorted(a)) for a in actions]
        self.d = d
        self._w = {A: 1.0 / len(self.actions) for A in self.actions}
        self._point = np.zeros(d)
        for A, v in self._w.items():
            for a in A:
                self._point[a] += v

    def weights(self):
        return dict(self._w), self._point.copy(), list(self._w)

    def feed(self, reward):
        pass


def reduce_take(weights: np.ndarray, scores: np.ndarray, mass: float) -> np.ndarray:
    """Vectorized form of reduce_support on aligned arrays.

    Returns the per-entry mass taken: entries are consumed in descending score
    order (stable among ties) until `mass` is reached, the last one partially.
    """
    order = np.argsort(-scores, kind="stable")
    sw = weights[order]
    cum = np.cumsum(sw)
    taken = np.minimum(sw, np.maximum(mass - (cum - sw), 0.0))
    out = np.empty_like(weights)
    out[order] = taken
    return out


class _TransformedBase:
    """Shared sparse bookkeeping for OFW and LLOO.

    The support is append-only (it mirrors supp of the cumulative weights) and
    is stored as aligned arrays: action list, weight vector and incidence
    matrix, so per-round work is vectorized in the support size.
    """

    def __init__(self, anchor_actions, d: int, oracle):
        self.d = d
        self.oracle = oracle
        self.actions = [tuple(sorted(A)) for A in anchor_actions]
        self._index = {A: i for i, A in enumerate(self.actions)}
        n = len(self.actions)
        self.w = np.full(n, 1.0 / n)
        self.inc = np.stack([incidence(A, d) for A in self.actions])
        self.point = self.w @ self.inc
        self.anchor = self.point.copy()
        self.cum_reward = np.zeros(d)
        self.t = 0

    @property
    def sparse(self) -> dict:
        return {A: float(v) for A, v in zip(self.actions, self.w)}

    def weights(self):
        return self.sparse, self.point.copy(), list(self.actions)

    def weights_arrays(self):
        return self.actions, self.w, self.point

    def _ensure_action(self, action) -> int:
        idx = self._index.get(action)
        if idx is None:
            idx = len(self.actions)
            self.actions.append(action)
            self._index[action] = idx
            self.w = np.append(self.w, 0.0)
            self.inc = np.vstack([self.inc, incidence(action, self.d)])
        return idx


class OFWLearner(_TransformedBase):
    """Online Frank-Wolfe on the transformed simplex; anytime, step t^{-1/4}."""

    def __init__(self, anchor_actions, d, oracle, diameter: float):
        super().__init__(anchor_actions, d, oracle)
        self.diameter = diameter
        self._coef_sum = 0.0

    def feed(self, reward):
        self.t += 1
        t = self.t
        self.cum_reward += reward
        self._coef_sum += t ** (-0.25)
        grad = (2.0 * self._coef_sum / self.diameter * (self.point - self.anchor) - self.cum_reward) / t
        idx = self._ensure_action(tuple(sorted(self.oracle(-grad))))
        gamma = t ** (-0.25)
        self.point += gamma * (self.inc[idx] - self.point)
        self.w *= 1.0 - gamma
        self.w[idx] += gamma


class LLOOLearner(_TransformedBase):
    """Local linear-optimization-oracle Frank-Wolfe variant with doubling trick.

    Each epoch refreshes the step parameters using the max reward norm seen so
    far (1.0 before any feedback); the current point carries over.
    """

    def __init__(self, anchor_actions, d, oracle, polytope: PolytopeParams):
        super().__init__(anchor_actions, d, oracle)
        self.polytope = polytope
        self._max_r_norm = 1.0
        self._epoch = 0
        self._start_epoch()

    def _start_epoch(self):
        self.horizon = doubling_schedule(self._epoch)
        self.params = lloo_params(self.horizon, self.polytope, self._max_r_norm, self.d)
        self.cum_reward = np.zeros(self.d)
        self.t_epoch = 0

    def feed(self, reward):
        reward = np.asarray(reward, dtype=float)
        self.t += 1
        self.t_epoch += 1
        self.cum_reward += reward
        self._max_r_norm = max(self._max_r_norm, float(np.linalg.norm(reward)))
        grad = 2.0 * (self.point - self.anchor) - self.params.eta * self.cum_reward
        idx = self._ensure_action(tuple(sorted(self.oracle(-grad))))
        mass = self.params.mass
        gamma = self.params.gamma
        taken = reduce_take(self.w, self.inc @ grad, mass)
        self.point += gamma * (mass * self.inc[idx] - taken @ self.inc)
        self.w -= gamma * taken
        np.clip(self.w, 0.0, None, out=self.w)
        self.w[idx] += gamma * mass
        if self.t_epoch >= self.horizon:
            self._epoch += 1
            self._start_epoch()


def make_learner(kind: str, action_space, polytope: PolytopeParams | None = None, cover=None):
    """Learner factory; simplex kinds need an enumerator, transformed kinds a cover."""
    if kind in ("hedge", "adahedge", "uniform"):
        if action_space.enumerator is None:
            raise ValueError(f"{kind} requires an enumerable action space")
        cls = {"hedge": HedgeLearner, "adahedge": AdaHedgeLearner, "uniform": UniformLearner}[kind]
        return cls(action_space.enumerator, action_space.d)
    if cover is None:
        cover = covering_initialization(action_space)
    if polytope is None:
        from .structures import polytope_params

        polytope = polytope_params(action_space)
    if kind == "ofw":
        return OFWLearner(cover, action_space.d, action_space.oracle, polytope.diameter)
    if kind == "lloo":
        return LLOOLearner(cover, action_space.d, action_space.oracle, polytope)
    raise ValueError(f"unknown learner kind {kind!r}")
