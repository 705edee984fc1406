import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combexplore.learners import (
    AdaHedgeLearner,
    HedgeLearner,
    LLOOLearner,
    OFWLearner,
    UniformLearner,
    covering_initialization,
    doubling_schedule,
    lloo_params,
    make_learner,
    reduce_support,
    reduce_take,
)
from combexplore.structures import ActionSpace, PolytopeParams, incidence, polytope_params


def test_doubling_schedule():
    assert doubling_schedule(0) == 200
    assert doubling_schedule(1) == 523
    assert doubling_schedule(2) == 1370
    with pytest.raises(ValueError):
        doubling_schedule(-1)


def test_covering_initialization_topk():
    space = ActionSpace.top_k(5, 3)
    cover = covering_initialization(space)
    assert len(cover) == 2  # ceil(5/3)
    covered = set()
    for a in cover:
        covered |= set(a)
    assert covered == set(range(5))


class TestHedge:
    def make(self, n=4, d=4):
        actions = [(i,) for i in range(n)]
        return HedgeLearner(actions, d)

    def test_equal_losses_uniform(self):
        h = self.make()
        w, point, _ = h.weights()
        assert np.allclose(list(w.values()), 0.25)
        h.feed(np.ones(4))
        w, _, _ = h.weights()
        assert np.allclose(list(w.values()), 0.25)

    def test_softmax_hand_example(self):
        h = self.make(n=2, d=2)
        h.L = {(0,): 0.0, (1,): 1.0}
        h.eta = 1.0
        w, _, _ = h.weights()
        z = 1.0 + math.exp(-1.0)
        assert w[(0,)] == pytest.approx(1.0 / z, rel=1e-9)
        assert w[(1,)] == pytest.approx(math.exp(-1.0) / z, rel=1e-9)

    @given(st.lists(st.floats(-50, 50), min_size=4, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_weights_normalized(self, losses):
        h = self.make()
        h.L = {(i,): losses[i] for i in range(4)}
        w, _, _ = h.weights()
        assert abs(sum(w.values()) - 1.0) <= 1e-12
        assert all(v >= 0 for v in w.values())

    def test_shift_invariance(self):
        h1 = self.make()
        h2 = self.make()
        h1.L = {(i,): float(i) for i in range(4)}
        h2.L = {(i,): float(i) + 17.5 for i in range(4)}
        w1, _, _ = h1.weights()
        w2, _, _ = h2.weights()
        for A in w1:
            assert w1[A] == pytest.approx(w2[A], abs=1e-10)

    def test_doubling_resets_epoch(self):
        h = self.make()
        for _ in range(doubling_schedule(0)):
            h.feed(np.random.default_rng(0).uniform(0, 1, 4))
        assert h.horizon == doubling_schedule(1)
        assert all(v == 0.0 for v in h.L.values())


class TestAdaHedge:
    def make(self, n=3, d=3):
        return AdaHedgeLearner([(i,) for i in range(n)], d)

    def test_identical_losses_stay_uniform(self):
        a = self.make()
        for _ in range(5):
            a.weights()
            a.feed(np.full(3, 0.3))
        w, _, _ = a.weights()
        assert np.allclose(list(w.values()), 1.0 / 3)
        assert a.gap_sum == pytest.approx(0.0, abs=1e-12)

    def test_follow_the_leader_while_gap_is_zero(self):
        a = self.make()
        # before the mixability gap accumulates the rate is infinite and the
        # learner plays the loss minimizer (max reward = min loss)
        a.L = {(0,): -1.0, (1,): -0.5, (2,): -0.1}
        w, _, _ = a.weights()
        assert w[(0,)] == 1.0
        assert w[(1,)] == 0.0

    def test_rate_finite_after_informative_feed(self):
        a = self.make()
        a.weights()
        a.feed(np.array([1.0, 0.5, 0.1]))
        assert math.isfinite(a.eta)
        w, _, _ = a.weights()
        assert w[(0,)] > w[(1,)] > w[(2,)]
        assert sum(w.values()) == pytest.approx(1.0)

    def test_rate_monotone_decreasing(self):
        a = self.make()
        rng = np.random.default_rng(0)
        etas = []
        for _ in range(50):
            a.weights()
            a.feed(rng.uniform(0, 1, 3))
            etas.append(a.eta)
        assert all(b <= a_ + 1e-12 for a_, b in zip(etas, etas[1:]))


class TestReduce:
    def test_full_mass_identity(self):
        w = {(0,): 0.6, (1,): 0.4}
        vec, out = reduce_support(w, 1.0, np.array([1.0, 0.0]), 2)
        assert out == pytest.approx(w)
        assert np.allclose(vec, [0.6, 0.4])

    def test_hand_trace(self):
        w = {(0,): 0.7, (1,): 0.3}
        cost = np.array([5.0, 1.0])
        vec, out = reduce_support(w, 0.5, cost, 2)
        assert out == {(0,): 0.5}
        assert np.allclose(vec, [0.5, 0.0])

    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6), st.floats(0.01, 0.99))
    @settings(max_examples=50, deadline=None)
    def test_mass_conservation(self, raw, frac):
        total = sum(raw)
        w = {(i,): v / total for i, v in enumerate(raw)}
        mass = frac * sum(w.values())
        d = len(raw)
        cost = np.arange(d, dtype=float)
        vec, out = reduce_support(w, mass, cost, d)
        assert sum(out.values()) == pytest.approx(mass, abs=1e-12)
        recon = np.zeros(d)
        for A, v in out.items():
            recon[list(A)] += v
        assert np.allclose(vec, recon)

    def test_mass_error(self):
        with pytest.raises(ValueError):
            reduce_support({(0,): 0.5}, 0.8, np.zeros(1), 1)

    def test_reduce_take_agrees_with_reference(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = rng.integers(2, 8)
            weights = rng.uniform(0.05, 1.0, n)
            weights /= weights.sum()
            scores = rng.normal(size=n)  # continuous, ties have measure zero
            mass = float(rng.uniform(0.1, 1.0))
            actions = [(i,) for i in range(n)]
            sparse = dict(zip(actions, weights))
            _, ref = reduce_support(sparse, mass, scores, n)
            take = reduce_take(weights, scores, mass)
            for i, A in enumerate(actions):
                assert take[i] == pytest.approx(ref.get(A, 0.0), abs=1e-12)


class TestLLOOParams:
    def test_gamma_formula(self):
        p = lloo_params(100, PolytopeParams(diameter=1.0, phi=1.0, psi=math.sqrt(2.0)), 1.0, 3)
        assert p.gamma == pytest.approx(1.0 / (3 * 3 * 2.0))

    def test_limits_in_horizon(self):
        poly = PolytopeParams(diameter=2.0, phi=1.0, psi=1.0)
        p1 = lloo_params(100, poly, 1.0, 5)
        p2 = lloo_params(10**8, poly, 1.0, 5)
        assert p2.mass < p1.mass
        assert p2.eta < p1.eta
        assert p2.mass < 0.01

    def test_mass_cap(self):
        poly = PolytopeParams(diameter=2.0, phi=1.0, psi=1.0)
        assert lloo_params(4, poly, 1.0, 10).mass == 1.0


class TestTransformedLearners:
    def space(self):
        return ActionSpace.top_k(5, 2)

    def build(self, kind):
        return make_learner(kind, self.space())

    def test_ofw_full_step_at_t1(self):
        space = self.space()
        learner = make_learner("ofw", space)
        reward = np.array([5.0, 4.0, 0.0, 0.0, 0.0])
        learner.feed(reward)
        _, point, _ = learner.weights()
        assert np.allclose(point, incidence((0, 1), 5))

    def test_single_action_space_fixed_point(self):
        space = ActionSpace.explicit([(0, 1)], 2)
        for kind in ["ofw", "lloo"]:
            learner = make_learner(kind, space, polytope=PolytopeParams(1.0, 1.0, 1.0))
            for _ in range(10):
                learner.feed(np.random.default_rng(0).uniform(0, 1, 2))
            _, point, _ = learner.weights()
            assert np.allclose(point, [1.0, 1.0])

    def test_lloo_zero_mass_no_movement(self):
        learner = self.build("lloo")
        learner.params.mass = 0.0
        _, before, _ = learner.weights()
        learner.feed(np.ones(5))
        _, after, _ = learner.weights()
        assert np.allclose(before, after)

    @pytest.mark.parametrize("kind", ["ofw", "lloo"])
    def test_support_grows_at_most_one_per_step(self, kind):
        learner = self.build(kind)
        rng = np.random.default_rng(1)
        prev = set(learner.actions)
        for _ in range(1000):
            learner.feed(rng.uniform(0, 1, 5))
            cur = set(learner.actions)
            assert len(cur - prev) <= 1
            prev = cur

    @pytest.mark.parametrize("kind", ["ofw", "lloo"])
    def test_point_matches_sparse_representation(self, kind):
        learner = self.build(kind)
        rng = np.random.default_rng(2)
        for step in range(500):
            learner.feed(rng.uniform(0, 2, 5))
            if step % 100 == 0:
                w, point, _ = learner.weights()
                recon = np.zeros(5)
                for A, v in w.items():
                    recon[list(A)] += v
                assert np.allclose(point, recon, atol=1e-8)
                assert abs(sum(w.values()) - 1.0) <= 1e-9
                assert min(w.values()) >= -1e-12


class TestUniform:
    def test_constant_weights(self):
        space = ActionSpace.top_k(4, 2)
        u = UniformLearner(space.enumerator, 4)
        w1, p1, _ = u.weights()
        u.feed(np.ones(4))
        w2, p2, _ = u.weights()
        assert w1 == w2
        assert np.allclose(p1, p2)
        assert abs(sum(w1.values()) - 1.0) < 1e-12


class TestRegretSublinearity:
    @pytest.mark.parametrize("kind", ["hedge", "adahedge", "lloo"])
    def test_average_regret_decreasing(self, kind):
        space = ActionSpace.top_k(5, 2)
        learner = make_learner(kind, space)
        rng = np.random.default_rng(3)
        inc = np.stack([incidence(a, 5) for a in space.enumerator])
        base = rng.uniform(0.2, 1.0, 5)
        cum_u = np.zeros(len(space.enumerator))
        cum_mix = 0.0
        ratios = []
        horizon = 10**4
        for t in range(1, horizon + 1):
            _, point, _ = learner.weights()
            r = base + rng.uniform(0, 0.3, 5)
            cum_u += inc @ r
            cum_mix += float(point @ r)
            learner.feed(r)
            if t in (horizon // 2, horizon):
                ratios.append((cum_u.max() - cum_mix) / t)
        assert ratios[1] <= ratios[0]
