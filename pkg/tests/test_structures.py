import itertools

import numpy as np
import pytest

from combexplore.structures import (
    ActionSpace,
    AlmostAllSetsOracle,
    AnswerSpace,
    DagPathOracle,
    ExplicitListOracle,
    PolytopeParams,
    TopKOracle,
    incidence,
    params_from_description,
    polytope_params,
)


def brute_force_value(enumerator, cost):
    return max(sum(cost[a] for a in A) for A in enumerator)


class TestTopK:
    def test_hand_example(self):
        assert TopKOracle(3, 2)(np.array([3.0, 1.0, 2.0])) == (0, 2)

    def test_tie_break_lowest_index(self):
        assert TopKOracle(4, 2)(np.zeros(4)) == (0, 1)

    def test_matches_enumeration(self):
        rng = np.random.default_rng(1)
        for d, k in [(6, 3), (8, 3), (10, 3)]:
            oracle = TopKOracle(d, k)
            subsets = list(itertools.combinations(range(d), k))
            for _ in range(40):
                cost = rng.normal(size=d)
                got = sum(cost[a] for a in oracle(cost))
                assert got == pytest.approx(brute_force_value(subsets, cost), abs=1e-12)

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            TopKOracle(3, 4)


class TestDagPath:
    def test_parallel_edges(self):
        oracle = DagPathOracle([("s", "t", 0), ("s", "t", 1)], "s", "t")
        assert oracle(np.array([1.0, 2.0])) == (1,)

    def test_matches_enumeration_line_network(self):
        from combexplore.scenarios import line_edges

        edges, s, t = line_edges(2, 4)
        oracle = DagPathOracle(edges, s, t)
        paths = oracle.enumerate_paths()
        assert len(paths) == 16
        rng = np.random.default_rng(2)
        for _ in range(100):
            cost = rng.normal(size=oracle.d)
            got = sum(cost[a] for a in oracle(cost))
            assert got == pytest.approx(brute_force_value(paths, cost), abs=1e-10)

    def test_zero_costs_valid_path(self):
        from combexplore.scenarios import grid_edges

        edges, s, t = grid_edges(4)
        oracle = DagPathOracle(edges, s, t)
        path = oracle(np.zeros(oracle.d))
        assert path in oracle.enumerate_paths()

    def test_cycle_detection(self):
        with pytest.raises(ValueError):
            DagPathOracle([("a", "b", 0), ("b", "a", 1)], "a", "a")

    def test_unreachable_sink(self):
        with pytest.raises(ValueError):
            DagPathOracle([("s", "x", 0), ("y", "t", 1)], "s", "t")

    def test_deterministic_on_repeat(self):
        from combexplore.scenarios import grid_edges

        edges, s, t = grid_edges(6)
        oracle = DagPathOracle(edges, s, t)
        cost = np.random.default_rng(5).normal(size=oracle.d)
        assert oracle(cost) == oracle(cost)


class TestAlmostAllSets:
    def test_size(self):
        for d in [4, 6]:
            assert len(AlmostAllSetsOracle(d).enumerate_actions()) == 2 ** (d - 1)

    def test_matches_enumeration(self):
        oracle = AlmostAllSetsOracle(6)
        ref = ExplicitListOracle(oracle.enumerate_actions(), 6)
        rng = np.random.default_rng(3)
        for _ in range(200):
            cost = rng.normal(size=6)
            got = sum(cost[a] for a in oracle(cost))
            want = sum(cost[a] for a in ref(cost))
            assert got == pytest.approx(want, abs=1e-12)


class TestIncidence:
    def test_examples(self):
        assert np.array_equal(incidence((0, 2), 4), [1, 0, 1, 0])
        assert np.array_equal(incidence((1,), 3), [0, 1, 0])

    def test_counting_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            action = tuple(np.sort(rng.choice(10, size=rng.integers(1, 6), replace=False)))
            assert incidence(action, 10).sum() == len(action)

    def test_range_check(self):
        with pytest.raises(ValueError):
            incidence((4,), 3)


class TestAnswerSpace:
    def test_bai_neighbors(self):
        sp = AnswerSpace.singletons(3)
        assert sp.neighbors((0,)) == [(1,), (2,)]

    def test_neighbor_count_explicit(self):
        sp = AnswerSpace(d=4, answers=[(0, 1), (1, 2), (2, 3)])
        for a in sp.answers:
            nb = sp.neighbors(a)
            assert len(nb) == len(sp.answers) - 1
            assert a not in nb

    def test_unknown_answer(self):
        sp = AnswerSpace.singletons(3)
        with pytest.raises(ValueError):
            sp.neighbors((5,))


class TestPolytopeParams:
    def test_singleton_space(self):
        sp = ActionSpace.top_k(4, 1)
        p = polytope_params(sp)
        assert p.diameter == pytest.approx(np.sqrt(2.0))
        assert p.phi == pytest.approx(1.0)
        assert p.psi == pytest.approx(1.0)
        assert p.mu_poly == pytest.approx(np.sqrt(2.0))

    def test_topk_d4_k2_diameter(self):
        sp = ActionSpace.top_k(4, 2)
        p = polytope_params(sp)
        assert p.diameter == pytest.approx(2.0)
        # cross-check against enumerated max pairwise distance
        verts = np.stack([incidence(a, 4) for a in sp.enumerator])
        brute = max(
            np.linalg.norm(x - y) for i, x in enumerate(verts) for y in verts[i + 1 :]
        )
        assert p.diameter == pytest.approx(brute)

    def test_mu_formula_exact(self):
        p = PolytopeParams(diameter=2.0, phi=0.5, psi=1.5)
        assert p.mu_poly == 1.5 * 2.0 / 0.5

    def test_translation_invariance(self):
        sp = ActionSpace.top_k(5, 2)
        verts = np.stack([incidence(a, 5) for a in sp.enumerator])
        rows = np.vstack([-np.eye(5), np.eye(5)])
        rhs = np.concatenate([np.zeros(5), np.ones(5)])
        base = params_from_description(verts, rows, rhs)
        shift = np.full(5, 0.7)
        shifted = params_from_description(verts + shift, rows, rhs + rows @ shift)
        assert shifted.mu_poly == pytest.approx(base.mu_poly, abs=1e-9)

    def test_almost_all_sets_closed_form(self):
        sp = ActionSpace.almost_all_sets(6)
        p = polytope_params(sp)
        assert p.diameter == pytest.approx(np.sqrt(6.0))


class TestOracleOptimalityInvariant:
    @pytest.mark.parametrize(
        "space",
        [
            ActionSpace.top_k(6, 3),
            ActionSpace.almost_all_sets(6),
        ],
        ids=["top_k", "almost_all_sets"],
    )
    def test_exact_optimality(self, space):
        rng = np.random.default_rng(8)
        for _ in range(200):
            cost = rng.normal(size=space.d)
            got = sum(cost[a] for a in space.oracle(cost))
            want = brute_force_value(space.enumerator, cost)
            assert got == want or got == pytest.approx(want, abs=1e-12)

    def test_tie_break_determinism(self):
        space = ActionSpace.top_k(6, 3)
        cost = np.array([1.0, 1.0, 0.0, 1.0, 0.0, 0.0])
        assert all(space.oracle(cost) == space.oracle(cost) for _ in range(5))

    def test_max_action_size_bound(self):
        rng = np.random.default_rng(9)
        for space in [ActionSpace.top_k(7, 3), ActionSpace.almost_all_sets(7)]:
            for _ in range(50):
                assert len(space.oracle(rng.normal(size=space.d))) <= space.max_action_size
