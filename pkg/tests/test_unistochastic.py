import json
import math

import numpy as np
import pytest

from birkhoff_lab.bracelet import is_bracelet, random_bracelet
from birkhoff_lab.core import (
    BistochasticMatrix,
    CirculantVector,
    circulant_array,
    circulant_to_matrix,
    cyclic_permutation,
    flat_matrix,
    identity,
    is_circulant,
    sinkhorn_sample,
)
from birkhoff_lab.errors import DimError
from birkhoff_lab.unistochastic import (
    Verdict,
    certify,
    close_triangle,
    exact_certificate,
    heuristic_witness,
    root_bracket_values,
    witness_d2,
    witness_d3,
    witness_d3_circulant,
    witness_d4_circulant,
)


def assert_sound(cert, eps_unitary=1e-9, eps_witness=1e-10):
    """Re-check a unistochastic certificate from scratch."""
    assert cert.verdict is Verdict.UNISTOCHASTIC
    u = np.asarray(cert.witness.matrix)
    assert np.linalg.norm(u @ u.conj().T - np.eye(len(u))) <= eps_unitary
    assert np.max(np.abs(np.abs(u) ** 2 - cert.target.entries)) <= eps_witness


def circulant_symmetry_error(v: np.ndarray) -> float:
    """max |V[j+l, k] - V[j, k-l]| over all j, k, l."""
    d = len(v)
    worst = 0.0
    for l in range(d):
        for j in range(d):
            for k in range(d):
                worst = max(worst, abs(v[(j + l) % d, k] - v[j, (k - l) % d]))
    return worst


class TestD2:
    def test_identity_pattern(self):
        w = witness_d2(identity(2))
        np.testing.assert_array_equal(w.matrix, 1j * np.eye(2))
        assert w.unitarity_residual == 0.0

    def test_half(self):
        w = witness_d2(flat_matrix(2))
        np.testing.assert_allclose(np.abs(w.matrix), 1 / math.sqrt(2))
        assert w.certified

    def test_swap(self):
        w = witness_d2(cyclic_permutation(2, 1))
        np.testing.assert_array_equal(np.abs(w.matrix), [[0, 1], [1, 0]])
        assert w.certified

    def test_dim(self):
        with pytest.raises(DimError):
            witness_d2(identity(3))


class TestD3:
    def test_triangle_closes(self):
        a, b = close_triangle(0.3, 0.4, 0.5)
        z = 0.3 + 0.4 * np.exp(1j * a) + 0.5 * np.exp(1j * b)
        assert abs(z) < 1e-15

    def test_q_rejected(self, q_matrix):
        cert = witness_d3(q_matrix)
        assert cert.verdict is Verdict.NOT_UNISTOCHASTIC
        v = cert.report.violation
        assert (v.axis, v.k, v.l) == ("column", 0, 1)

    def test_flat(self, w3):
        cert = witness_d3(w3)
        assert_sound(cert)
        assert cert.residual < 1e-12

    @pytest.mark.parametrize("power", [0, 1, 2])
    def test_permutations(self, power):
        cert = witness_d3(cyclic_permutation(3, power))
        assert_sound(cert)
        assert np.max(np.abs(cert.witness.matrix.imag)) < 1e-15

    def test_zero_entries(self):
        # boundary matrices with zeros in the first row and column
        b = BistochasticMatrix([[0.0, 0.5, 0.5], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]])
        r = is_bracelet(b)
        cert = witness_d3(b)
        assert (cert.verdict is Verdict.UNISTOCHASTIC) == r.holds

    def test_random_bracelet(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            assert_sound(witness_d3(random_bracelet(3, rng)))

    def test_dim(self):
        with pytest.raises(DimError):
            witness_d3(identity(4))


class TestD3Circulant:
    def test_unit(self):
        cert = witness_d3_circulant(CirculantVector([1, 0, 0]))
        np.testing.assert_allclose(cert.witness.matrix, np.eye(3), atol=1e-15)

    def test_flat(self):
        cert = witness_d3_circulant(CirculantVector([1 / 3] * 3))
        assert_sound(cert)
        np.testing.assert_allclose(np.abs(cert.witness.matrix), 1 / math.sqrt(3), atol=1e-15)
        assert circulant_symmetry_error(cert.witness.matrix) < 1e-12

    def test_not_bracelet(self):
        assert witness_d3_circulant(CirculantVector([0, 0.5, 0.5])).verdict is Verdict.NOT_UNISTOCHASTIC

    def test_grid_is_doubly_circulant(self):
        n = 25
        for i in range(n + 1):
            for j in range(n + 1 - i):
                c = CirculantVector(np.array([i, j, n - i - j]) / n)
                cert = witness_d3_circulant(c)
                if not is_bracelet(circulant_to_matrix(c)).holds:
                    assert cert.verdict is Verdict.NOT_UNISTOCHASTIC
                    continue
                assert_sound(cert)
                assert circulant_symmetry_error(cert.witness.matrix) < 1e-12


class TestD4Circulant:
    def test_flat(self):
        cert = witness_d4_circulant(CirculantVector([0.25] * 4))
        assert_sound(cert)
        assert is_circulant(cert.witness.matrix)
        assert -1.0 <= cert.phases.eta <= 0.0

    def test_not_bracelet(self):
        assert witness_d4_circulant(CirculantVector([0, 0.5, 0.5, 0])).verdict is Verdict.NOT_UNISTOCHASTIC

    def test_complementary_edge(self):
        assert_sound(witness_d4_circulant(CirculantVector([0.5, 0, 0.5, 0])))
        assert_sound(witness_d4_circulant(CirculantVector([0, 0.3, 0, 0.7])))

    @pytest.mark.parametrize("k", range(4))
    def test_vertices(self, k):
        alpha = np.zeros(4)
        alpha[k] = 1
        assert_sound(witness_d4_circulant(CirculantVector(alpha)))

    def test_row_shift_branch(self):
        # ac > bd forces the cyclic row shift
        cert = witness_d4_circulant(CirculantVector([0.4, 0.1, 0.4, 0.1]))
        assert_sound(cert)
        assert cert.phases.rows_shifted
        assert circulant_symmetry_error(cert.witness.matrix) < 1e-12

    def test_root_bracket_signs(self):
        rng = np.random.default_rng(2)
        checked = 0
        while checked < 200:
            c = CirculantVector(rng.dirichlet(np.ones(4)))
            if not is_bracelet(circulant_to_matrix(c)).holds:
                continue
            lo, hi = root_bracket_values(c)
            assert lo <= 1e-12 and hi >= -1e-12
            checked += 1

    def test_phase_solution_invariants(self):
        cert = witness_d4_circulant(CirculantVector([0.1, 0.2, 0.3, 0.4]))
        ph = cert.phases
        assert ph.root_residual <= 1e-12
        assert math.pi / 2 <= ph.beta <= 3 * math.pi / 2
        for angle in (ph.alpha, ph.beta, ph.gamma):
            assert 0 <= angle < 2 * math.pi
        row = np.sqrt([0.1, 0.2, 0.3, 0.4]) * np.exp(1j * np.array([0, ph.alpha, ph.beta, ph.gamma]))
        assert np.linalg.norm(circulant_array(row) @ circulant_array(row).conj().T - np.eye(4)) < 1e-9

    def test_dim(self):
        with pytest.raises(DimError):
            witness_d4_circulant(CirculantVector([0.5, 0.5]))


class TestHeuristic:
    @pytest.mark.parametrize("power", [0, 1, 3])
    def test_permutations(self, power):
        cert = heuristic_witness(cyclic_permutation(4, power), restarts=1)
        assert_sound(cert)
        assert cert.restarts_used == 1

    def test_rejects_non_bracelet_only_with_violation(self):
        b = BistochasticMatrix(np.kron(np.eye(2), np.array([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])))
        cert = heuristic_witness(b, restarts=1)
        assert cert.verdict is Verdict.NOT_UNISTOCHASTIC
        assert not cert.report.holds

    def test_unknown_has_evidence(self):
        # tiny budget on a hard input: never a false negative
        b = sinkhorn_sample(6, 4)
        cert = heuristic_witness(b, restarts=1, max_iters=3)
        assert cert.verdict in (Verdict.UNKNOWN, Verdict.UNISTOCHASTIC)
        if cert.verdict is Verdict.UNKNOWN:
            assert cert.best_residual > 0 and cert.restarts_used == 1

    def test_unitary_moduli_found(self):
        rng = np.random.default_rng(5)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(z)
        b = BistochasticMatrix(np.abs(u) ** 2)
        cert = heuristic_witness(b, restarts=20, seed=1)
        assert_sound(cert)

    def test_deterministic(self):
        b = BistochasticMatrix(np.abs(np.linalg.qr(np.arange(16).reshape(4, 4) + 1j * np.eye(4))[0]) ** 2)
        a1 = heuristic_witness(b, restarts=5, seed=3)
        a2 = heuristic_witness(b, restarts=5, seed=3)
        assert a1.verdict is a2.verdict
        if a1.witness is not None:
            np.testing.assert_array_equal(a1.witness.matrix, a2.witness.matrix)


class TestDispatch:
    def test_q(self, q_matrix):
        assert certify(q_matrix).verdict is Verdict.NOT_UNISTOCHASTIC

    def test_d1(self):
        assert_sound(certify(identity(1)))

    def test_circulant_d4_exact(self):
        cert = certify(circulant_to_matrix(CirculantVector([0.1, 0.2, 0.3, 0.4])), heuristic=False)
        assert cert.method == "d4-circulant"
        assert_sound(cert)

    def test_no_exact_path(self):
        b = random_bracelet(5, 1)
        assert exact_certificate(b) is None
        assert certify(b, heuristic=False) is None

    def test_d5_never_false_negative(self):
        rng = np.random.default_rng(6)
        for _ in range(3):
            cert = certify(random_bracelet(5, rng), restarts=2, max_iters=300)
            assert cert.verdict in (Verdict.UNISTOCHASTIC, Verdict.UNKNOWN)

    def test_json(self, q_matrix, w3):
        bad = certify(q_matrix).to_json()
        assert bad["verdict"] == "not_unistochastic" and bad["violation"]["axis"] == "column"
        good = certify(w3).to_json(witness_file="w.txt")
        assert good["verdict"] == "unistochastic" and good["witness_file"] == "w.txt"
        json.dumps(good)
