import numpy as np
import pytest

from gqsim.datasets import (
    LEFT,
    RIGHT,
    GraphProblem,
    LabeledPoints,
    build_pairs,
    gen_clusters,
    gen_delta_images,
    gen_graph_problem,
    gen_half_images,
    gen_moons,
    minmax_unit,
    truncated_normal,
)


def rng(seed=0):
    return np.random.default_rng(seed)


class TestHalfImages:
    def test_columns(self):
        d = gen_half_images(50, rng(), scale=1.0)
        left, right = d.of_class(LEFT), d.of_class(RIGHT)
        assert len(left) == len(right) == 25
        assert np.all(left[:, [1, 3]] == 0) and np.all(left[:, [0, 2]] > 0)
        assert np.all(right[:, [0, 2]] == 0)

    def test_scaled_by_pi(self):
        a = gen_half_images(10, rng(1))
        b = gen_half_images(10, rng(1), scale=1.0)
        np.testing.assert_allclose(a.points, np.pi * b.points)

    def test_deterministic(self):
        np.testing.assert_array_equal(gen_half_images(20, rng(5)).points,
                                      gen_half_images(20, rng(5)).points)

    def test_active_mean(self):
        d = gen_half_images(10 ** 4, rng(2), scale=1.0)
        active = d.points[d.points > 0]
        assert active.mean() == pytest.approx(0.5, abs=0.02)

    def test_odd(self):
        with pytest.raises(ValueError):
            gen_half_images(7, rng())


class TestClustersAndMoons:
    def test_zero_spread(self):
        c = [[0.2, 0.2], [0.8, 0.8]]
        d = gen_clusters(10, 2, 2, c, 0.0, rng())
        np.testing.assert_array_equal(d.points, np.asarray(c)[d.labels])

    def test_moons_noise_free(self):
        d = gen_moons(200, 0.0, rng())
        up, low = d.of_class(0), d.of_class(1)
        np.testing.assert_allclose(np.hypot(*up.T), 1, atol=1e-12)
        np.testing.assert_allclose(np.hypot(low[:, 0] - 1, low[:, 1] - 0.5), 1, atol=1e-12)
        assert np.all(up[:, 1] >= 0) and np.all(low[:, 1] <= 0.5)

    def test_blob_separation(self):
        # each center 6 sigma from the bisector; Gaussian tail 1 - Phi(6) ~ 1e-9
        centers = np.array([[-6.0, 0.0], [6.0, 0.0]])
        d = gen_clusters(10 ** 4, 2, 2, centers, 1.0, rng(3))
        nearest = np.argmin(((d.points[:, None] - centers[None]) ** 2).sum(-1), axis=1)
        assert np.mean(nearest == d.labels) >= 0.999

    def test_blob_error_matches_gaussian_tail(self):
        # centers 2a apart: misassignment probability is 1 - Phi(a)
        from scipy.stats import norm
        a = 1.5
        d = gen_clusters(10 ** 5, 2, 1, [[-a], [a]], 1.0, rng(4))
        err = np.mean((d.points[:, 0] > 0) != d.labels.astype(bool))
        p = norm.sf(a)
        assert abs(err - p) < 5 * np.sqrt(p * (1 - p) / 10 ** 5)

    @pytest.mark.parametrize("args", [(9, 2, 2), (4, 0, 2), (4, 2, 0)])
    def test_cluster_errors(self, args):
        n, k, dim = args
        with pytest.raises(ValueError):
            gen_clusters(n, k, dim, np.zeros((max(k, 1), max(dim, 1))), 0.1, rng())

    def test_moons_errors(self):
        with pytest.raises(ValueError):
            gen_moons(5, 0.1, rng())
        with pytest.raises(ValueError):
            gen_moons(6, -0.1, rng())


class TestDeltaImages:
    def test_degenerate(self):
        img = gen_delta_images(0.0, 3, rng(), eps=0.0, scale=1.0)
        np.testing.assert_array_equal(img, np.tile([0, 1, 0, 1], (3, 1)))

    def test_complementary_columns(self):
        img = gen_delta_images(0.3, 100, rng(), scale=1.0)
        np.testing.assert_allclose(img[:, 0] + img[:, 1], 1.0, atol=1e-15)
        np.testing.assert_allclose(img[:, 2] + img[:, 3], 1.0, atol=1e-15)
        np.testing.assert_array_equal(img[:, 0], img[:, 2])

    def test_midpoint_mean(self):
        img = gen_delta_images(0.5, 10 ** 4, rng(4), scale=1.0)
        assert img[:, 0].mean() == pytest.approx(0.5, abs=0.01)

    def test_truncation(self):
        x = truncated_normal(0.0, 0.5, 5000, rng())
        assert x.min() >= 0 and x.max() <= 1

    def test_range(self):
        with pytest.raises(ValueError):
            gen_delta_images(1.5, 2, rng())


class TestBuildPairs:
    def test_counts(self):
        X = gen_half_images(100, rng(0))
        Xt = gen_clusters(100, 2, 2, [[0.2, 0.2], [0.8, 0.8]], 0.07, rng(1))
        pairs = build_pairs(X, Xt, {LEFT: 0, RIGHT: 1})
        assert len(pairs) == 10 ** 4
        assert len(pairs.similar_idx) == len(pairs.dissimilar_idx) == 5000

    def test_labels_and_flip(self):
        X = LabeledPoints([[0.0], [1.0]], [0, 1])
        Xt = LabeledPoints([[5.0], [6.0], [7.0]], [0, 1, 1])
        a = build_pairs(X, Xt, {0: 0, 1: 1})
        b = build_pairs(X, Xt, {0: 1, 1: 0})
        np.testing.assert_array_equal(a.y, [1, 0, 0, 0, 1, 1])
        np.testing.assert_array_equal(b.y, 1 - a.y)
        np.testing.assert_array_equal(a.Xt[:3, 0], [5, 6, 7])

    def test_missing_association(self):
        X = LabeledPoints([[0.0], [1.0]], [0, 1])
        with pytest.raises(ValueError):
            build_pairs(X, X, {0: 0})

    def test_roundtrip(self):
        X = LabeledPoints([[0.0], [1.0]], [0, 1])
        p = build_pairs(X, X, {0: 0, 1: 1})
        q = type(p).from_dict(p.to_dict())
        np.testing.assert_array_equal(p.y, q.y)


class TestGraph:
    def test_fully_observed(self):
        g = gen_graph_problem(12, 2, 2, 1.0, rng())
        assert np.all(g.observed_mask == ~np.eye(12, dtype=bool))
        assert len(g.hidden_pairs()) == 0

    def test_single_cluster_complete(self):
        g = gen_graph_problem(8, 1, 2, 0.5, rng())
        np.testing.assert_array_equal(g.adjacency, 1 - np.eye(8, dtype=int))

    @pytest.mark.parametrize("seed", range(5))
    def test_observed_count(self, seed):
        n, f = 60, 0.1
        g = gen_graph_problem(n, 2, 2, f, rng(seed))
        total = n * (n - 1) / 2
        sigma = np.sqrt(total * f * (1 - f))
        assert abs(len(g.observed_pairs()) - f * total) <= 3 * sigma

    def test_attributes_in_box(self):
        g = gen_graph_problem(30, 2, 2, 0.1, rng())
        assert g.attributes.points.min() == pytest.approx(0)
        assert g.attributes.points.max() == pytest.approx(np.pi)
        assert np.array_equal(g.adjacency, g.adjacency.T)

    def test_view_hides(self):
        g = gen_graph_problem(10, 2, 2, 0.3, rng())
        view = g.observed_view()
        hidden = g.hidden_pairs()
        assert np.all(view[hidden[:, 0], hidden[:, 1]] == -1)

    def test_errors(self):
        with pytest.raises(ValueError):
            gen_graph_problem(10, 2, 2, 0.0, rng())
        with pytest.raises(ValueError):
            GraphProblem(LabeledPoints([[0.0], [1.0]], [0, 1]), [[0, 1], [0, 0]],
                         np.zeros((2, 2), bool))

    def test_roundtrip(self):
        g = gen_graph_problem(10, 2, 2, 0.3, rng())
        h = GraphProblem.from_dict(g.to_dict())
        np.testing.assert_array_equal(g.observed_mask, h.observed_mask)


def test_minmax_unit():
    p = np.array([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]])
    np.testing.assert_allclose(minmax_unit(p), [[0, 0], [1, 0], [0.5, 0]])
