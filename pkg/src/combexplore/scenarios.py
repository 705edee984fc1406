"""Benchmark scenario families: uniform matroid, grid and line networks, and
the needle-in-a-haystack "almost all sets" family.

Network means are drawn from a seeded Normal(0.2, 0.025^2), sorted in
decreasing order, with the top mean bumped by 0.025 so the best arm is unique
with a workable gap.  Arms are indexed by mean rank, so the best arm is
always arm 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandit import BanditInstance
from .structures import ActionSpace, AnswerSpace

__all__ = [
    "Scenario",
    "scenario_uniform_matroid",
    "scenario_grid_network",
    "scenario_line_network",
    "scenario_almost_all_sets",
    "make_scenario",
]

# fixed mean tables for the uniform-matroid family, entries 4..d (1-based);
# the first three arms are always (0.3, 0.29, 0.28)
_MATROID_HEAD = [0.3, 0.29, 0.28]
_MATROID_TAILS = {
    5: [0.23, 0.2],
    10: [0.232, 0.224, 0.207, 0.200, 0.192, 0.182, 0.176],
}
_MATROID_TAILS[15] = _MATROID_TAILS[10] + [0.214, 0.199, 0.195, 0.190, 0.164]
_MATROID_TAILS[20] = _MATROID_TAILS[15] + [0.185, 0.19, 0.195, 0.199, 0.214]
_MATROID_TAILS[25] = _MATROID_TAILS[20] + [0.158, 0.172, 0.211, 0.228, 0.244]
_MATROID_TAILS[30] = _MATROID_TAILS[25] + [0.174, 0.18, 0.194, 0.202, 0.23, 0.242]
_MATROID_TAILS[35] = _MATROID_TAILS[30] + [0.17, 0.178, 0.219, 0.222, 0.226]
_MATROID_TAILS[40] = _MATROID_TAILS[35] + [0.197, 0.198, 0.201, 0.203, 0.205]
_MATROID_TAILS[45] = _MATROID_TAILS[40] + [0.193, 0.206, 0.208, 0.21]
_MATROID_TAILS[50] = _MATROID_TAILS[45] + [0.188, 0.189, 0.191, 0.212, 0.213]

# "almost all sets" tables: first arm 0.3, entries 2..d below
_AAS_TAILS = {7: [0.24, 0.23, 0.22, 0.21, 0.2, 0.19]}
for _d, _v in [(8, 0.18), (9, 0.17), (10, 0.16), (11, 0.215), (12, 0.195), (13, 0.205), (14, 0.185)]:
    _AAS_TAILS[_d] = _AAS_TAILS[_d - 1] + [_v]


@dataclass
class Scenario:
    name: str
    instance: BanditInstance
    action_space: ActionSpace
    answer_space: AnswerSpace
    expected_best: tuple

    def __post_init__(self):
        best = tuple(sorted(self.answer_space.oracle(self.instance.means)))
        if best != tuple(sorted(self.expected_best)):
            raise ValueError(f"expected_best {self.expected_best} is not the argmax answer {best}")


def scenario_uniform_matroid(d: int, k: int, sigma: float) -> Scenario:
    if d not in _MATROID_TAILS:
        raise ValueError(f"unsupported d={d}; pick one of {sorted(_MATROID_TAILS)}")
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    # the published tables overshoot by one entry for some d; keep the prefix
    mu = np.array(_MATROID_HEAD + _MATROID_TAILS[d])[:d]
    instance = BanditInstance(means=mu, stddevs=np.full(d, float(sigma)))
    return Scenario(
        name=f"uniform_matroid_d{d}_k{k}",
        instance=instance,
        action_space=ActionSpace.top_k(d, k),
        answer_space=AnswerSpace.singletons(d),
        expected_best=(0,),
    )


def _network_means(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    mu = np.sort(rng.normal(0.2, 0.025, size=d))[::-1].copy()
    mu[0] += 0.025
    return mu


def grid_edges(n_s: int):
    """Edge list `(u, v, arm)` of the square grid DAG with n_s stages.

    Nodes are lattice points (i, j) with 0 <= i, j <= n_s/2; moves go right or
    down; every source-sink path has exactly n_s edges.
    """
    if n_s < 2 or n_s % 2:
        raise ValueError("n_s must be even and >= 2")
    m = n_s // 2
    edges = []
    arm = 0
    for i in range(m + 1):
        for j in range(m + 1):
            if i < m:
                edges.append(((i, j), (i + 1, j), arm))
                arm += 1
            if j < m:
                edges.append(((i, j), (i, j + 1), arm))
                arm += 1
    return edges, (0, 0), (m, m)


def scenario_grid_network(n_s: int, sigma: float, seed: int = 0, enumerate_actions: bool | None = None) -> Scenario:
    edges, source, sink = grid_edges(n_s)
    d = len(edges)
    assert d == n_s * (n_s // 2 + 1)
    if enumerate_actions is None:
        enumerate_actions = n_s <= 10
    space = ActionSpace.dag_paths(edges, source, sink, enumerate_actions=enumerate_actions)
    mu = _network_means(d, seed)
    instance = BanditInstance(means=mu, stddevs=np.full(d, float(sigma)))
    return Scenario(
        name=f"grid_network_ns{n_s}",
        instance=instance,
        action_space=space,
        answer_space=AnswerSpace.singletons(d),
        expected_best=(0,),
    )


def line_edges(n_n: int, n_l: int):
    """Layered network: source, n_l layers of n_n nodes, sink; consecutive
    layers fully connected."""
    if n_n < 2 or n_l < 2:
        raise ValueError("need n_n >= 2 and n_l >= 2")
    edges = []
    arm = 0
    for j in range(n_n):
        edges.append(("s", (0, j), arm))
        arm += 1
    for layer in range(n_l - 1):
        for j in range(n_n):
            for j2 in range(n_n):
                edges.append((((layer, j)), (layer + 1, j2), arm))
                arm += 1
    for j in range(n_n):
        edges.append(((n_l - 1, j), "t", arm))
        arm += 1
    return edges, "s", "t"


def scenario_line_network(n_n: int, n_l: int, sigma: float, seed: int = 0, enumerate_actions: bool | None = None) -> Scenario:
    edges, source, sink = line_edges(n_n, n_l)
    d = len(edges)
    assert d == 2 * n_n + (n_l - 1) * n_n**2
    if enumerate_actions is None:
        enumerate_actions = n_n**n_l <= 4096
    space = ActionSpace.dag_paths(edges, source, sink, enumerate_actions=enumerate_actions)
    mu = _network_means(d, seed)
    instance = BanditInstance(means=mu, stddevs=np.full(d, float(sigma)))
    return Scenario(
        name=f"line_network_nn{n_n}_nl{n_l}",
        instance=instance,
        action_space=space,
        answer_space=AnswerSpace.singletons(d),
        expected_best=(0,),
    )


def scenario_almost_all_sets(d: int, sigma: float) -> Scenario:
    if d not in _AAS_TAILS:
        raise ValueError(f"unsupported d={d}; pick one of {sorted(_AAS_TAILS)}")
    mu = np.array([0.3] + _AAS_TAILS[d])
    instance = BanditInstance(means=mu, stddevs=np.full(d, float(sigma)))
    return Scenario(
        name=f"almost_all_sets_d{d}",
        instance=instance,
        action_space=ActionSpace.almost_all_sets(d),
        answer_space=AnswerSpace.singletons(d),
        expected_best=(0,),
    )


def make_scenario(spec: str) -> Scenario:
    """Build a scenario from a string like `uniform_matroid:d=5,k=3,sigma=0.1`."""
    name, _, argstr = spec.partition(":")
    kwargs = {}
    if argstr:
        for part in argstr.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            kwargs[key] = float(val) if key == "sigma" else int(val)
    builders = {
        "uniform_matroid": scenario_uniform_matroid,
        "grid_network": scenario_grid_network,
        "line_network": scenario_line_network,
        "almost_all_sets": scenario_almost_all_sets,
    }
    if name not in builders:
        raise ValueError(f"unknown scenario family {name!r}")
    return builders[name](**kwargs)
