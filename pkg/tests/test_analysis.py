import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gqsim.analysis import (
    Histogram,
    angle_grid,
    density_of_states,
    goodness_estimate,
    lambda_improvement,
    lambda_map,
    landmark_count,
    landmark_map,
    linear_separator_check,
    retrieval_loss,
    retrieval_optimum,
    total_variation,
    wasserstein_1d,
)
from gqsim.similarity import toy_s1_closed, toy_s2_closed

samples = arrays(float, st.integers(1, 30), elements=st.floats(-5, 5))


def block_similarity(labels, within=1.0, across=0.0):
    labels = np.asarray(labels)

    def s_fn(A, B):
        la = labels[np.asarray(A, dtype=int)[:, 0]]
        lb = labels[np.asarray(B, dtype=int)[:, 0]]
        return np.where(la[:, None] == lb[None, :], within, across)
    return s_fn


class TestHistogram:
    def test_validation(self):
        with pytest.raises(ValueError):
            Histogram([0, 1], [1, 1])
        with pytest.raises(ValueError):
            Histogram([0, 1, 0.5], [1, 1])

    def test_tv_needs_same_bins(self):
        with pytest.raises(ValueError):
            total_variation(Histogram([0, 1], [1]), Histogram([0, 2], [0.5]))


class TestDensityOfStates:
    def test_constant(self):
        h = density_of_states(lambda x, xt: 0.5 + 0 * x * xt)
        assert np.count_nonzero(h.mass) == 1

    @pytest.mark.parametrize("fn", [toy_s1_closed, toy_s2_closed])
    def test_normalized(self, fn):
        assert density_of_states(fn).mass.sum() == pytest.approx(1.0)

    def test_s1_symmetric(self):
        h = density_of_states(toy_s1_closed)
        mirrored = density_of_states(lambda x, xt: 1.0 - toy_s1_closed(x, xt))
        assert total_variation(h, mirrored) <= 0.02

    def test_s2_mode_lowest(self):
        assert density_of_states(toy_s2_closed).mode_bin == 0

    def test_small_grid(self):
        with pytest.raises(ValueError):
            density_of_states(toy_s1_closed, grid_n=5)

    def test_angle_grid(self):
        g = angle_grid(4)
        np.testing.assert_allclose(g, [np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi])


class TestRetrieval:
    def test_perfect(self):
        s = lambda a, b: np.where(np.isclose(a, 1.0), 1.0, 0.0) + 0 * b
        assert retrieval_loss(s, 0.2, 1.0, 2.0) == 0.0

    def test_value(self):
        s = lambda a, b: 0.5 + 0 * (a + b)
        assert retrieval_loss(s, 0.0, 1.0, 2.0) == pytest.approx(0.5 * np.sqrt(0.5))

    def test_optimum_is_grid_min(self):
        g = angle_grid(200)
        x, val = retrieval_optimum(toy_s2_closed, 0.3, 0.5, 200)
        brute = [retrieval_loss(toy_s2_closed, t, 0.3, 0.5) for t in g]
        assert val == pytest.approx(min(brute))
        assert x == g[int(np.argmin(brute))]

    def test_lambda_degenerate(self):
        assert np.isfinite(lambda_improvement(0.7, 0.7))

    def test_lambda_map_matches_pointwise(self):
        axis, lam = lambda_map(grid_xy=8, grid_n=60)
        for i, j in [(0, 3), (5, 2), (7, 7)]:
            assert lam[i, j] == pytest.approx(lambda_improvement(axis[i], axis[j], 60), abs=1e-14)


class TestWasserstein:
    def test_identical(self):
        a = np.random.default_rng(0).normal(size=50)
        assert wasserstein_1d(a, a) == 0

    def test_point_masses(self):
        assert wasserstein_1d([0.0], [1.0]) == pytest.approx(1.0)

    def test_shift(self):
        g = np.linspace(0, 1, 101)
        assert wasserstein_1d(g, g + 0.25) == pytest.approx(0.25)

    def test_empty(self):
        with pytest.raises(ValueError):
            wasserstein_1d([], [1.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 30).flatmap(
        lambda n: st.tuples(arrays(float, n, elements=st.floats(-5, 5)),
                            arrays(float, n, elements=st.floats(-5, 5)))))
    def test_sorted_coupling_oracle(self, ab):
        a, b = ab
        assert wasserstein_1d(a, b) == pytest.approx(np.mean(np.abs(np.sort(a) - np.sort(b))),
                                                     abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(samples, samples, samples)
    def test_triangle(self, a, b, c):
        assert wasserstein_1d(a, c) <= wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9


class TestGoodness:
    labels = np.array([0] * 5 + [1] * 5)
    points = np.arange(10.0)[:, None]

    def test_block_structure(self):
        rep = goodness_estimate(block_similarity(self.labels), self.points, self.labels, 0.25)
        np.testing.assert_allclose(rep.margins, 4 / 9)
        assert rep.epsilon_hat == 0

    def test_constant(self):
        s = block_similarity(self.labels, 0.5, 0.5)
        rep = goodness_estimate(s, self.points, self.labels, 0.011)
        assert np.all(np.abs(rep.margins) < 0.1)
        assert rep.epsilon_hat == 1

    def test_vacuous_gamma(self):
        rng = np.random.default_rng(0)
        S = rng.uniform(size=(10, 10))
        s = lambda A, B: S[np.ix_(A[:, 0].astype(int), B[:, 0].astype(int))]
        assert goodness_estimate(s, self.points, self.labels, -1).epsilon_hat == 0

    def test_relabel_invariant(self):
        rng = np.random.default_rng(1)
        S = rng.uniform(size=(10, 10))
        s = lambda A, B: S[np.ix_(A[:, 0].astype(int), B[:, 0].astype(int))]
        a = goodness_estimate(s, self.points, self.labels, 0.05)
        b = goodness_estimate(s, self.points, 1 - self.labels, 0.05)
        np.testing.assert_allclose(a.margins, b.margins)
        assert a.epsilon_hat == b.epsilon_hat

    def test_reference_set(self):
        s = block_similarity(np.r_[self.labels, self.labels])
        ref = np.arange(10.0, 20.0)[:, None]
        rep = goodness_estimate(s, self.points, self.labels, 0.25, ref, self.labels)
        np.testing.assert_allclose(rep.margins, 0.5)

    def test_needs_two_classes(self):
        with pytest.raises(ValueError):
            goodness_estimate(block_similarity(self.labels), self.points, np.zeros(10), 0.1)


class TestLandmarks:
    def test_count_example(self):
        assert landmark_count(1.0, 2 / np.e, 1.0) == 18

    def test_tau_halving_doubles(self):
        assert landmark_count(1.0, 2 / np.e, 0.5) == 36
        # ceil(2d) is 2 ceil(d) or one less
        for gamma, delta in [(0.5, 0.1), (0.3, 0.05), (0.9, 0.5)]:
            full, half = landmark_count(gamma, delta, 1.0), landmark_count(gamma, delta, 0.5)
            assert half in (2 * full - 1, 2 * full)

    @pytest.mark.parametrize("args", [(0, 0.5, 1), (1, 1.0, 1), (1, 0.5, 0)])
    def test_range(self, args):
        with pytest.raises(ValueError):
            landmark_count(*args)

    def test_map_self(self):
        s = lambda A, B: np.exp(-((A[:, None, :] - B[None]) ** 2).sum(-1))
        np.testing.assert_allclose(landmark_map(s, [[0.3, 0.1]], [0.3, 0.1]), [1.0])
        assert landmark_map(s, [[0.0], [1.0]], [[0.0], [1.0], [2.0]]).shape == (3, 2)


class TestSeparator:
    def test_separable(self):
        rng = np.random.default_rng(0)
        phi = np.vstack([rng.normal(0, 0.1, (30, 4)), rng.normal(1, 0.1, (30, 4))])
        err, margin = linear_separator_check(phi, np.repeat([0, 1], 30))
        assert err == 0 and margin > 0

    def test_random_labels(self):
        rng = np.random.default_rng(1)
        phi = rng.normal(size=(400, 4))
        err, _ = linear_separator_check(phi, rng.integers(0, 2, 400))
        assert err == pytest.approx(0.5, abs=0.1)

    def test_errors(self):
        with pytest.raises(ValueError):
            linear_separator_check(np.ones((4, 2)), [0, 0, 1, 1])
        with pytest.raises(ValueError):
            linear_separator_check(np.eye(3), [0, 1])
