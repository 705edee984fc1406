"""Action and answer spaces as linear-maximization oracles over 0-1 polytopes.

An oracle is a picklable callable mapping a cost vector c in R^d to an action
(a sorted tuple of arm indices) attaining max_A <1_A, c>.  Ties are broken
deterministically, by lowest arm index for top-k and by enumeration order for
explicit lists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TopKOracle",
    "DagPathOracle",
    "ExplicitListOracle",
    "AlmostAllSetsOracle",
    "ActionSpace",
    "AnswerSpace",
    "PolytopeParams",
    "incidence",
    "polytope_params",
    "params_from_description",
]


def incidence(action, d: int) -> np.ndarray:
    """0-1 vector of length d with ones on the action's arms."""
    v = np.zeros(d)
    idx = np.asarray(tuple(action), dtype=np.intp)
    if len(idx) and (idx.min() < 0 or idx.max() >= d):
        raise ValueError("arm index out of range")
    v[idx] = 1.0
    return v


class TopKOracle:
    """Greedy oracle for the uniform matroid: the k largest cost entries."""

    def __init__(self, d: int, k: int):
        if not 1 <= k <= d:
            raise ValueError(f"k={k} out of range for d={d}")
        self.d = d
        self.k = k

    def __call__(self, cost) -> tuple:
        cost = np.asarray(cost, dtype=float)
        # stable sort of -cost keeps the lowest index first among ties
        order = np.argsort(-cost, kind="stable")
        return tuple(sorted(int(a) for a in order[: self.k]))

    def __repr__(self):
        return f"TopKOracle(d={self.d}, k={self.k})"


class DagPathOracle:
    """Maximum-cost s-t path in a DAG by dynamic programming in topological order.

    edges: list of (u, v, arm_index) with hashable node labels.  The returned
    action is the set of arm indices along an optimal path.  Works with
    negative costs (gradients), unlike Dijkstra.
    """

    def __init__(self, edges, source, sink):
        self.edges = [(u, v, int(a)) for u, v, a in edges]
        self.source = source
        self.sink = sink
        self.d = max(a for _, _, a in self.edges) + 1
        self._order = self._toposort()
        # adjacency as incoming lists in topological node order
        self._incoming = {node: [] for node in self._order}
        for u, v, a in self.edges:
            self._incoming[v].append((u, a))
        if self.sink not in self._incoming or self.source not in self._incoming:
            raise ValueError("source or sink missing from edge list")
        self._check_reachability()

    def _toposort(self):
        nodes = set()
        for u, v, _ in self.edges:
            nodes.add(u)
            nodes.add(v)
        out = {n: [] for n in nodes}
        indeg = {n: 0 for n in nodes}
        for u, v, _ in self.edges:
            out[u].append(v)
            indeg[v] += 1
        frontier = sorted((n for n in nodes if indeg[n] == 0), key=repr)
        order = []
        while frontier:
            n = frontier.pop(0)
            order.append(n)
            for m in out[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    frontier.append(m)
            frontier.sort(key=repr)
        if len(order) != len(nodes):
            raise ValueError("graph contains a cycle")
        return order

    def _check_reachability(self):
        if self(np.zeros(self.d)) is None:
            raise ValueError("sink not reachable from source")

    def __call__(self, cost) -> tuple | None:
        cost = np.asarray(cost, dtype=float)
        value = {self.source: 0.0}
        back = {}
        for node in self._order:
            if node == self.source:
                continue
            best_v, best_e = None, None
            for u, a in self._incoming[node]:
                if u not in value:
                    continue
                v = value[u] + cost[a]
                if best_v is None or v > best_v:
                    best_v, best_e = v, (u, a)
            if best_v is not None:
                value[node] = best_v
                back[node] = best_e
        if self.sink not in value:
            return None
        path = []
        node = self.sink
        while node != self.source:
            u, a = back[node]
            path.append(a)
            node = u
        return tuple(sorted(path))

    def enumerate_paths(self):
        """All s-t paths as sorted arm tuples (exponential; small graphs only)."""
        out = {}
        for u, v, a in self.edges:
            out.setdefault(u, []).append((v, a))
        results = []

        def walk(node, acc):
            if node == self.sink:
                results.append(tuple(sorted(acc)))
                return
            for v, a in out.get(node, []):
                walk(v, acc + [a])

        walk(self.source, [])
        return sorted(results)


class ExplicitListOracle:
    """Brute-force argmax over an explicit action list; first maximizer wins."""

    def __init__(self, actions, d: int):
        self.actions = [tuple(sorted(a)) for a in actions]
        if not self.actions:
            raise ValueError("empty action list")
        self.d = d
        self._inc = np.stack([incidence(a, d) for a in self.actions])

    def __call__(self, cost) -> tuple:
        vals = self._inc @ np.asarray(cost, dtype=float)
        return self.actions[int(np.argmax(vals))]


class AlmostAllSetsOracle:
    """Oracle for A = {{0}} union all nonempty subsets of {1, ..., d-1}.

    The best subset avoiding arm 0 takes all strictly positive costs (or the
    single largest entry if none is positive); it is compared against {0}.
    """

    def __init__(self, d: int):
        if d < 2:
            raise ValueError("need d >= 2")
        self.d = d

    def __call__(self, cost) -> tuple:
        cost = np.asarray(cost, dtype=float)
        rest = cost[1:]
        pos = np.nonzero(rest > 0)[0]
        if len(pos):
            subset = tuple(int(a) + 1 for a in pos)
            val = float(rest[pos].sum())
        else:
            a = int(np.argmax(rest))
            subset = (a + 1,)
            val = float(rest[a])
        if cost[0] >= val:
            return (0,)
        return subset

    def enumerate_actions(self):
        acts = [(0,)]
        for r in range(1, self.d):
            acts.extend(itertools.combinations(range(1, self.d), r))
        return acts


@dataclass
class ActionSpace:
    """A combinatorial action family behind a linear-maximization oracle."""

    d: int
    oracle: object
    max_action_size: int
    kind: str
    enumerator: list | None = None

    @classmethod
    def top_k(cls, d: int, k: int, enumerate_actions: bool = True):
        oracle = TopKOracle(d, k)
        enum = None
        if enumerate_actions:
            enum = [tuple(c) for c in itertools.combinations(range(d), k)]
        return cls(d=d, oracle=oracle, max_action_size=k, kind="top_k", enumerator=enum)

    @classmethod
    def dag_paths(cls, edges, source, sink, enumerate_actions: bool = False):
        oracle = DagPathOracle(edges, source, sink)
        enum = oracle.enumerate_paths() if enumerate_actions else None
        if enum:
            kmax = max(len(a) for a in enum)
        else:
            # longest path by edge count
            kmax = len(oracle(np.ones(oracle.d)))
        return cls(d=oracle.d, oracle=oracle, max_action_size=kmax, kind="dag_paths", enumerator=enum)

    @classmethod
    def explicit(cls, actions, d: int):
        actions = [tuple(sorted(a)) for a in actions]
        oracle = ExplicitListOracle(actions, d)
        return cls(
            d=d,
            oracle=oracle,
            max_action_size=max(len(a) for a in actions),
            kind="explicit_list",
            enumerator=list(actions),
        )

    @classmethod
    def almost_all_sets(cls, d: int, enumerate_actions: bool = True):
        oracle = AlmostAllSetsOracle(d)
        enum = oracle.enumerate_actions() if enumerate_actions and d <= 20 else None
        return cls(d=d, oracle=oracle, max_action_size=d - 1, kind="almost_all_sets", enumerator=enum)


@dataclass
class AnswerSpace:
    """Answer family with an argmax oracle and a neighbor map.

    Neighbors default to "all other answers", a conservative superset that
    never weakens the stopping rule.
    """

    d: int
    answers: list
    oracle: object = None

    def __post_init__(self):
        self.answers = [tuple(sorted(a)) for a in self.answers]
        if len(self.answers) < 2:
            raise ValueError("need at least two answers")
        if self.oracle is None:
            self.oracle = ExplicitListOracle(self.answers, self.d)

    @classmethod
    def singletons(cls, d: int):
        return cls(d=d, answers=[(a,) for a in range(d)])

    def neighbors(self, answer) -> list:
        answer = tuple(sorted(answer))
        if answer not in self.answers:
            raise ValueError(f"unknown answer {answer}")
        return [a for a in self.answers if a != answer]


@dataclass
class PolytopeParams:
    diameter: float
    phi: float
    psi: float
    mu_poly: float = field(default=None)

    def __post_init__(self):
        if self.mu_poly is None:
            self.mu_poly = self.psi * self.diameter / self.phi
        if min(self.diameter, self.phi, self.psi, self.mu_poly) <= 0:
            raise ValueError("polytope parameters must be strictly positive")


def _max_pairwise_distance(vertices: np.ndarray, chunk: int = 512) -> float:
    """Max Euclidean distance between rows, chunked to bound memory."""
    sq = np.einsum("ij,ij->i", vertices, vertices)
    best = 0.0
    n = len(vertices)
    for i in range(0, n, chunk):
        block = vertices[i : i + chunk]
        d2 = sq[i : i + chunk, None] + sq[None, :] - 2.0 * block @ vertices.T
        best = max(best, float(d2.max()))
    return float(np.sqrt(max(best, 0.0)))


def _spectral_norm_subsets(rows: np.ndarray) -> float:
    """Exact max spectral norm over full-rank sets of independent rows (<= 12 rows)."""
    r = int(np.linalg.matrix_rank(rows))
    best = 0.0
    for combo in itertools.combinations(range(len(rows)), r):
        sub = rows[list(combo)]
        if np.linalg.matrix_rank(sub) < r:
            continue
        best = max(best, float(np.linalg.norm(sub, 2)))
    return best


def _spectral_norm_greedy(rows: np.ndarray) -> float:
    """Greedy approximation: grow an independent row set to full rank, taking
    the row with the largest spectral norm at each step."""
    r = int(np.linalg.matrix_rank(rows))
    chosen: list[int] = []
    remaining = list(range(len(rows)))
    while len(chosen) < r and remaining:
        gains = []
        for i in remaining:
            sub = rows[chosen + [i]]
            if np.linalg.matrix_rank(sub) < len(chosen) + 1:
                continue
            gains.append((float(np.linalg.norm(sub, 2)), i))
        if not gains:
            break
        _, i = max(gains)
        chosen.append(i)
        remaining.remove(i)
    if not chosen:
        return 0.0
    return float(np.linalg.norm(rows[chosen], 2))


def params_from_description(vertices: np.ndarray, rows: np.ndarray, rhs: np.ndarray) -> PolytopeParams:
    """Geometry parameters from vertices and an inequality description R x <= b."""
    vertices = np.asarray(vertices, dtype=float)
    rows = np.asarray(rows, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    diam = _max_pairwise_distance(vertices)
    slacks = rhs[None, :] - vertices @ rows.T
    pos = slacks[slacks > 1e-12]
    if len(pos) == 0:
        raise ValueError("no positive slack; degenerate polytope description")
    phi = float(pos.min())
    if len(rows) <= 12:
        psi = _spectral_norm_subsets(rows)
    else:
        psi = _spectral_norm_greedy(rows)
    return PolytopeParams(diameter=diam, phi=phi, psi=psi)


def polytope_params(space: ActionSpace) -> PolytopeParams:
    """Geometry of the transformed simplex conv{1_A}.

    The inequality description used is the 0-1 box 0 <= x <= 1, which is valid
    for every family here (all vertices are 0-1); matroid equality constraints
    carry no inequality slack and are omitted.
    """
    d = space.d
    if space.kind == "top_k":
        k = space.max_action_size
        diam = float(np.sqrt(2.0 * min(k, d - k))) if d > k else None
        if diam is None or diam == 0.0:
            raise ValueError("top-k with k=d is a single point")
    elif space.kind == "almost_all_sets":
        diam = float(np.sqrt(d))
    elif space.enumerator is not None:
        verts = np.stack([incidence(a, d) for a in space.enumerator])
        diam = _max_pairwise_distance(verts)
    else:
        raise ValueError(f"no enumerator and no closed form for kind {space.kind!r}")
    rows = np.vstack([-np.eye(d), np.eye(d)])
    rhs = np.concatenate([np.zeros(d), np.ones(d)])
    if space.enumerator is not None and len(space.enumerator) <= 4096:
        verts = np.stack([incidence(a, d) for a in space.enumerator])
        base = params_from_description(verts, rows, rhs)
        return PolytopeParams(diameter=diam, phi=base.phi, psi=base.psi)
    # 0-1 vertices against the box description: every positive slack is 1 and
    # the rows are signed unit vectors, so phi = psi = 1 exactly
    return PolytopeParams(diameter=diam, phi=1.0, psi=1.0)
