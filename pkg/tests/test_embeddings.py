import numpy as np
import pytest

from gqsim.embeddings import (
    EmbeddingSpec,
    embedding_template,
    qaoa_embedding,
    ring_pairs,
    toy_pair_circuit,
    weight_count,
)
from gqsim.statevector import circuit_unitary, run_circuit

from oracles import printed_toy_matrix, qaoa_matrix


class TestSpec:
    @pytest.mark.parametrize("args", [(0, 1, 1), (2, 0, 1), (2, 1, 3), (2, 1, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            EmbeddingSpec(*args)

    @pytest.mark.parametrize("n,L,expected", [(4, 2, 16), (2, 1, 3), (1, 3, 3), (3, 2, 12)])
    def test_weight_count(self, n, L, expected):
        spec = EmbeddingSpec(n, L, 1)
        assert weight_count(spec) == expected
        # count the weight-bound gates actually constructed
        tmpl = embedding_template(spec)
        assert sum(g.is_weight for g in tmpl.gates) == expected

    def test_ring_pairs(self):
        assert ring_pairs(1) == []
        assert ring_pairs(2) == [(0, 1)]
        assert ring_pairs(4) == [(0, 1), (1, 2), (2, 3), (3, 0)]


class TestQaoa:
    def test_zero_angles_identity(self):
        c = qaoa_embedding(EmbeddingSpec(2, 1, 2), [0, 0], np.zeros(3))
        np.testing.assert_allclose(circuit_unitary(c), np.eye(4), atol=1e-12)

    def test_gate_count(self):
        spec = EmbeddingSpec(4, 2, 4)
        assert len(qaoa_embedding(spec, np.zeros(4), np.zeros(16))) == 2 * (4 + 4 + 4) + 4

    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_feature_slot_occurrences(self, d):
        spec = EmbeddingSpec(4, 3, d)
        c = qaoa_embedding(spec, np.ones(d), np.zeros(weight_count(spec)))
        for k in range(d):
            assert len(c.slot_occurrences("feature", k)) == 4
        # padded qubits receive unbound RX(0)
        pads = [g for g in c.gates if g.kind == "RX" and not g.is_feature]
        assert len(pads) == 4 * (4 - d) and all(g.angle == 0 for g in pads)

    @pytest.mark.parametrize("n,L,d", [(4, 2, 4), (4, 2, 2), (3, 1, 2), (2, 2, 1), (1, 2, 1)])
    def test_matches_layer_oracle(self, n, L, d):
        rng = np.random.default_rng(n * 100 + L * 10 + d)
        spec = EmbeddingSpec(n, L, d)
        x = rng.uniform(0, np.pi, d)
        w = rng.uniform(-np.pi, np.pi, weight_count(spec))
        U = circuit_unitary(qaoa_embedding(spec, x, w))
        np.testing.assert_allclose(U, qaoa_matrix(n, L, d, x, w), atol=1e-12)

    def test_deterministic(self):
        spec = EmbeddingSpec(4, 2, 2)
        w = np.arange(16) * 0.1
        assert qaoa_embedding(spec, [0.3, 0.4], w) == qaoa_embedding(spec, [0.3, 0.4], w)

    @pytest.mark.parametrize("x,w", [([0.1], np.zeros(16)), ([0.1, 0.2], np.zeros(15)),
                                     ([np.nan, 0.2], np.zeros(16))])
    def test_bad_inputs(self, x, w):
        with pytest.raises(ValueError):
            qaoa_embedding(EmbeddingSpec(4, 2, 2), x, w)


class TestToy:
    def test_cnot_at_zero(self):
        cnot = np.eye(4)[[0, 1, 3, 2]]
        np.testing.assert_allclose(circuit_unitary(toy_pair_circuit(0, 0)), cnot, atol=1e-12)

    def test_printed_matrix(self):
        np.testing.assert_allclose(circuit_unitary(toy_pair_circuit(np.pi / 2, np.pi / 3)),
                                   printed_toy_matrix(np.pi / 2, np.pi / 3), atol=1e-12)

    @pytest.mark.parametrize("x,xt", [(0.3, 1.1), (2.0, 5.0), (np.pi, 0.2)])
    def test_first_amplitude(self, x, xt):
        amp = run_circuit(toy_pair_circuit(x, xt)).amplitudes[0]
        assert abs(amp) ** 2 == pytest.approx(np.cos(x / 2) ** 2 * np.cos(xt / 2) ** 2, abs=1e-12)

    def test_slots(self):
        c = toy_pair_circuit(0.1, 0.2)
        assert c.slot_occurrences("feature", 0) == [2]
        assert c.slot_occurrences("feature", 1) == [0]
