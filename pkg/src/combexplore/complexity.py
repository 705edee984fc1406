"""Brute-force complexity oracle: the max-min allocation value and its
sample-complexity lower bound, used as ground truth for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from .bandit import kl_gaussian_vec
from .engine import _best_neighbor, best_response_gaussian, best_response_value, recommend
from .learners import covering_initialization
from .structures import incidence

__all__ = ["ComplexityResult", "LowerBound", "compute_complexity", "lower_bound"]


@dataclass
class ComplexityResult:
    value: float
    allocation: np.ndarray
    iterations: int
    residual: float


@dataclass
class LowerBound:
    value: float
    vacuous: bool


def _objective(w, mu, istar, neighbors, sigmas):
    """g(w) = min over competing answers of the best-response value."""
    jstar, value = _best_neighbor(mu, istar, neighbors, w, sigmas)
    return jstar, value


_POLISH_MAX_ACTIONS = 256


def _polish(mu, istar, neighbors, sigmas, action_space, d):
    """Epigraph solve over action mixtures: max z s.t. z <= g_J(w(alpha)).

    The objective is concave in alpha, so the local solver is globally exact;
    used to sharpen the Frank-Wolfe iterate, which can stall on the kinks of
    the min over neighbors.  Returns None when the space is too large.
    """
    actions = action_space.enumerator
    if actions is None or len(actions) > _POLISH_MAX_ACTIONS:
        return None
    inc = np.stack([incidence(a, d) for a in actions])
    n = len(actions)

    def value_at(alpha):
        w = np.clip(alpha, 0.0, None) @ inc
        _, v = _best_neighbor(mu, istar, neighbors, np.maximum(w, 1e-12), sigmas)
        return v

    cons = [{"type": "eq", "fun": lambda x: x[:n].sum() - 1.0}]
    for J in neighbors:
        sym = sorted(set(istar) ^ set(J))
        gap = sum(mu[a] for a in J) - sum(mu[a] for a in istar)
        sub = inc[:, sym]
        sig2 = sigmas[sym] ** 2

        def g_minus_z(x, gap=gap, sub=sub, sig2=sig2):
            w = np.maximum(np.clip(x[:-1], 0.0, None) @ sub, 1e-12)
            if gap >= 0.0:
                return -x[-1]
            return gap * gap / (2.0 * np.sum(sig2 / w)) - x[-1]

        cons.append({"type": "ineq", "fun": g_minus_z})
    x0 = np.concatenate([np.full(n, 1.0 / n), [0.0]])
    res = minimize(
        lambda x: -x[-1],
        x0,
        constraints=cons,
        bounds=[(0.0, 1.0)] * n + [(None, None)],
        method="SLSQP",
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    alpha = np.clip(res.x[:n], 0.0, None)
    alpha /= alpha.sum()
    w = alpha @ inc
    return w, value_at(alpha)


def _dual_gap(w, value, mu, istar, neighbors, sigmas, action_space, d):
    """Duality gap via Sion's minimax: the best mixture q over the active
    neighbors' best responses gives the certificate
    value <= min_q max_A <1_A, sum_J q_J d_KL(mu, lambda_J)>, solved as an LP
    over the enumerated action family.  Returns None when not enumerable.
    """
    actions = action_space.enumerator
    if actions is None or len(actions) > _POLISH_MAX_ACTIONS:
        return None
    active = []
    for J in neighbors:
        vj = best_response_value(mu, istar, J, w, sigmas)
        if vj <= value * (1.0 + 1e-6) + 1e-12:
            lam = best_response_gaussian(mu, istar, J, w, sigmas)
            active.append(kl_gaussian_vec(mu, lam, sigmas))
    if not active:
        return None
    G = np.stack(active)
    m = len(active)
    inc = np.stack([incidence(a, d) for a in actions])
    # variables (q_1..q_m, z): minimize z subject to inc G^T q <= z, q in simplex
    A_ub = np.hstack([inc @ G.T, -np.ones((len(actions), 1))])
    res = linprog(
        c=np.concatenate([np.zeros(m), [1.0]]),
        A_ub=A_ub,
        b_ub=np.zeros(len(actions)),
        A_eq=np.concatenate([np.ones(m), [0.0]])[None, :],
        b_eq=[1.0],
        bounds=[(0.0, 1.0)] * m + [(None, None)],
    )
    if not res.success:
        return None
    return max(float(res.x[-1]) - value, 0.0)


def compute_complexity(instance, action_space, answer_space, tol: float = 1e-6, max_iter: int = 100_000) -> ComplexityResult:
    """Frank-Wolfe supergradient ascent on the concave allocation game value.

    The supergradient at w is the per-arm KL to the minimizing best response;
    the linear-maximization oracle supplies the ascent vertex; step 2/(k+2).
    On small enumerable spaces the iterate is polished by an exact convex
    solve, since plain Frank-Wolfe can stall where several neighbor values tie.
    """
    mu = instance.means
    sigmas = instance.stddevs
    istar = recommend(mu, answer_space)
    vals = sorted((sum(mu[a] for a in I), I) for I in answer_space.answers)
    if len(vals) >= 2 and vals[-1][0] == vals[-2][0]:
        raise ValueError("best answer is not unique; complexity is degenerate")
    neighbors = answer_space.neighbors(istar)

    cover = covering_initialization(action_space)
    w = np.mean([incidence(a, instance.d) for a in cover], axis=0)
    value = 0.0
    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        jstar, value = _objective(w, mu, istar, neighbors, sigmas)
        lam = best_response_gaussian(mu, istar, jstar, w, sigmas)
        grad = kl_gaussian_vec(mu, lam, sigmas)
        vertex = incidence(action_space.oracle(grad), instance.d)
        gap = float(grad @ (vertex - w))
        if gap <= tol:
            break
        step = 2.0 / (it + 2.0)
        w = w + step * (vertex - w)
    _, value = _objective(w, mu, istar, neighbors, sigmas)
    polished = _polish(mu, istar, neighbors, sigmas, action_space, instance.d)
    if polished is not None and polished[1] > value:
        w, value = polished
    dual = _dual_gap(w, value, mu, istar, neighbors, sigmas, action_space, instance.d)
    residual = dual if dual is not None else gap
    return ComplexityResult(value=value, allocation=w, iterations=it, residual=residual)


def lower_bound(delta: float, complexity_value: float) -> LowerBound:
    """Expected-sample lower bound ln(1/(2.4 delta)) / D; vacuous if delta >= 1/2.4."""
    if complexity_value <= 0:
        raise ValueError("complexity value must be positive")
    num = math.log(1.0 / (2.4 * delta))
    if num <= 0.0:
        return LowerBound(value=0.0, vacuous=True)
    return LowerBound(value=num / complexity_value, vacuous=False)
