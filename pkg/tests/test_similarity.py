from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqsim.embeddings import EmbeddingSpec, toy_pair_circuit
from gqsim.similarity import (
    MeasureSpec,
    SimilarityModel,
    distance,
    pair_similarity,
    pair_similarity_batch,
    similarity,
    similarity_batch,
    similarity_matrix,
    subspace_dims,
    toy_s1_closed,
    toy_s2_closed,
    zeta,
)
from gqsim.statevector import (
    hs_overlap,
    overlap_pure,
    partial_trace_first_m,
    prob_zero_prefix,
    run_circuit,
)

from oracles import circuit_matrix, partial_trace_loops

FULL = MeasureSpec("full")


def random_model(n, dx, dt, seed, L=2, shared=False):
    rng = np.random.default_rng(seed)
    return SimilarityModel.random(EmbeddingSpec(n, L, dx), EmbeddingSpec(n, L, dt), rng,
                                  shared_weights=shared)


def oracle_similarity(model, measure, x, xt):
    """Measure computed from unitaries built by the Kronecker oracle."""
    n = model.n_qubits
    u, v = model.circuits(x, xt)
    U, V = circuit_matrix(u), circuit_matrix(v)
    a, b = U[:, 0], V[:, 0]
    if measure.kind == "full":
        return abs(np.vdot(a, b)) ** 2
    m = measure.m
    if measure.kind == "swap":
        rho, sigma = partial_trace_loops(a, n, m), partial_trace_loops(b, n, m)
        return np.trace(rho @ sigma).real
    phi = U.conj().T @ b
    return float(np.sum(np.abs(phi[: 2 ** (n - m)]) ** 2))


class TestMeasureSpec:
    @pytest.mark.parametrize("text,spec", [("full", MeasureSpec("full")),
                                           ("swap:2", MeasureSpec("swap", 2)),
                                           ("proj:1", MeasureSpec("proj", 1))])
    def test_parse_roundtrip(self, text, spec):
        assert MeasureSpec.parse(text) == spec
        assert str(spec) == text

    @pytest.mark.parametrize("text", ["swap", "proj:0", "full:2", "trace:1", "swap:x"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            MeasureSpec.parse(text)

    def test_prefix_range(self):
        assert MeasureSpec("full").prefix(3) == 3
        with pytest.raises(ValueError):
            MeasureSpec("swap", 4).prefix(3)


class TestModel:
    def test_shared_storage(self):
        m = random_model(2, 2, 2, 0, shared=True)
        assert m.eta is m.theta
        with pytest.raises(ValueError):
            SimilarityModel(m.spec_x, m.spec_xt, m.theta, m.theta + 1, shared_weights=True)

    def test_register_mismatch(self):
        with pytest.raises(ValueError):
            SimilarityModel(EmbeddingSpec(2, 1, 1), EmbeddingSpec(3, 1, 1), np.zeros(3),
                            np.zeros(6))

    def test_flat_roundtrip(self):
        m = random_model(3, 2, 1, 4)
        m2 = m.with_weights(m.flat_weights())
        np.testing.assert_array_equal(m2.theta, m.theta)
        np.testing.assert_array_equal(m2.eta, m.eta)
        assert SimilarityModel.from_dict(m.to_dict()).to_dict() == m.to_dict()

    def test_weights_frozen(self):
        m = random_model(2, 1, 1, 0)
        with pytest.raises(ValueError):
            m.theta[0] = 1.0


class TestSimilarity:
    @pytest.mark.parametrize("measure", ["full", "swap:1", "swap:2", "proj:1", "proj:2",
                                         "proj:3", "swap:3"])
    def test_matches_oracle(self, measure):
        ms = MeasureSpec.parse(measure)
        model = random_model(3, 3, 2, 11)
        rng = np.random.default_rng(12)
        for _ in range(5):
            x, xt = rng.uniform(0, np.pi, 3), rng.uniform(0, np.pi, 2)
            assert similarity(model, ms, x, xt) == pytest.approx(
                oracle_similarity(model, ms, x, xt), abs=1e-12)

    @pytest.mark.parametrize("measure", ["full", "swap:2", "proj:1"])
    def test_matches_state_api(self, measure):
        """Batched path agrees with the single-state functionals."""
        ms = MeasureSpec.parse(measure)
        model = random_model(3, 2, 2, 5)
        x, xt = [0.4, 1.3], [2.2, 0.1]
        u, v = model.circuits(x, xt)
        a, b = run_circuit(u), run_circuit(v)
        if ms.kind == "full":
            ref = overlap_pure(a, b)
        elif ms.kind == "swap":
            ref = hs_overlap(partial_trace_first_m(a, 2), partial_trace_first_m(b, 2))
        else:
            ref = prob_zero_prefix(run_circuit(u.adjoint(), b), 1)
        assert similarity(model, ms, x, xt) == pytest.approx(ref, abs=1e-12)

    def test_shared_identical_inputs(self):
        model = random_model(4, 2, 2, 1, shared=True)
        assert similarity(model, FULL, [0.3, 1.0], [0.3, 1.0]) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("measure", ["full", "swap:1", "proj:2"])
    def test_matrix_matches_batch(self, measure):
        ms = MeasureSpec.parse(measure)
        model = random_model(3, 2, 3, 8)
        rng = np.random.default_rng(0)
        X, Xt = rng.uniform(0, 3, (5, 2)), rng.uniform(0, 3, (4, 3))
        M = similarity_matrix(model, ms, X, Xt)
        B = similarity_batch(model, ms, np.repeat(X, 4, axis=0), np.tile(Xt, (5, 1)))
        np.testing.assert_allclose(M.ravel(), B, atol=1e-12)

    def test_feature_dim_checked(self):
        model = random_model(3, 2, 2, 0)
        with pytest.raises(ValueError):
            similarity(model, FULL, [0.1, 0.2, 0.3], [0.1, 0.2])

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10 ** 6), n=st.integers(1, 4), data=st.data())
    def test_range(self, seed, n, data):
        m = data.draw(st.integers(1, n))
        kind = data.draw(st.sampled_from(["full", "swap", "proj"]))
        ms = MeasureSpec(kind, None if kind == "full" else m)
        model = random_model(n, 1, 1, seed)
        rng = np.random.default_rng(seed)
        vals = similarity_batch(model, ms, rng.uniform(-7, 7, (6, 1)), rng.uniform(-7, 7, (6, 1)))
        assert np.all((vals >= 0) & (vals <= 1))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_coincidence_at_full_prefix(self, n):
        rng = np.random.default_rng(n)
        for seed in range(10):
            model = random_model(n, n, 2, seed)
            X, Xt = rng.uniform(0, np.pi, (4, n)), rng.uniform(0, np.pi, (4, 2))
            full = similarity_batch(model, FULL, X, Xt)
            np.testing.assert_allclose(similarity_batch(model, MeasureSpec("swap", n), X, Xt),
                                       full, atol=1e-10)
            np.testing.assert_allclose(similarity_batch(model, MeasureSpec("proj", n), X, Xt),
                                       full, atol=1e-10)

    @pytest.mark.parametrize("measure", ["full", "swap:1", "swap:2"])
    def test_symmetry_with_shared_weights(self, measure):
        ms = MeasureSpec.parse(measure)
        model = random_model(3, 2, 2, 21, shared=True)
        rng = np.random.default_rng(22)
        X, Y = rng.uniform(0, np.pi, (20, 2)), rng.uniform(0, np.pi, (20, 2))
        np.testing.assert_allclose(similarity_batch(model, ms, X, Y),
                                   similarity_batch(model, ms, Y, X), atol=1e-12)

    def test_projection_asymmetry_exists(self):
        model = random_model(2, 2, 2, 3, shared=True)
        rng = np.random.default_rng(4)
        X, Y = rng.uniform(0, np.pi, (100, 2)), rng.uniform(0, np.pi, (100, 2))
        ms = MeasureSpec("proj", 1)
        gap = np.abs(similarity_batch(model, ms, X, Y) - similarity_batch(model, ms, Y, X))
        assert gap.max() > 0.01


class TestDistance:
    def test_values(self, monkeypatch):
        import gqsim.similarity as sim
        for s, d in [(1.0, 0.0), (0.0, np.sqrt(2)), (0.5, 1.0)]:
            monkeypatch.setattr(sim, "similarity", lambda *a, s=s: s)
            assert sim.distance(None, FULL, None, None) == pytest.approx(d)

    def test_real_model(self):
        model = random_model(2, 1, 1, 0, shared=True)
        assert distance(model, FULL, [0.4], [0.4]) == pytest.approx(0.0, abs=1e-6)


class TestZeta:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
    def test_extremes(self, n):
        assert zeta(n, 1) == 1
        assert zeta(n, n) == Fraction(1, 2 ** n - 1)

    def test_example(self):
        assert zeta(3, 2) == Fraction(1, 3)
        assert subspace_dims(3, 2) == (2, 6)

    @pytest.mark.parametrize("m", [0, 4])
    def test_range(self, m):
        with pytest.raises(ValueError):
            zeta(3, m)


class TestToyClosedForms:
    def test_values(self):
        assert toy_s2_closed(0, 0) == 1
        assert toy_s1_closed(np.pi / 2, np.pi / 2) == pytest.approx(0.5)

    def test_identity(self):
        rng = np.random.default_rng(0)
        x, xt = rng.uniform(-7, 7, 100), rng.uniform(-7, 7, 100)
        alt = np.cos(x / 2) ** 2 * np.cos(xt / 2) ** 2 + np.sin(x / 2) ** 2 * np.sin(xt / 2) ** 2
        np.testing.assert_allclose(toy_s1_closed(x, xt), alt, atol=1e-12)

    def test_pair_circuit_projections(self):
        c = toy_pair_circuit(np.pi / 2, np.pi / 2)
        assert pair_similarity(c, MeasureSpec("proj", 1)) == pytest.approx(0.5, abs=1e-12)
        x, xt = 0.7, 2.9
        c = toy_pair_circuit(x, xt)
        assert pair_similarity(c, MeasureSpec("proj", 2)) == pytest.approx(
            toy_s2_closed(x, xt), abs=1e-12)

    def test_pair_batch_grid(self):
        g = 2 * np.pi * np.arange(1, 31) / 30
        gx, gt = np.meshgrid(g, g)
        F = np.column_stack([gx.ravel(), gt.ravel()])
        c = toy_pair_circuit(0, 0)
        np.testing.assert_allclose(pair_similarity_batch(c, MeasureSpec("proj", 2), F),
                                   toy_s2_closed(F[:, 0], F[:, 1]), atol=1e-10)
        np.testing.assert_allclose(pair_similarity_batch(c, MeasureSpec("proj", 1), F),
                                   toy_s1_closed(F[:, 0], F[:, 1]), atol=1e-10)

    def test_swap_rejected_for_pair_circuit(self):
        with pytest.raises(ValueError):
            pair_similarity(toy_pair_circuit(0, 0), MeasureSpec("swap", 1))
