import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_phases
from uqp.linalg import (
    as_hermitian,
    diagonal_load,
    frobenius_distance,
    hadamard,
    hermitian_eig,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    phases_of,
    quadratic_form,
    save_matrix,
    unimodular,
)


def naive_quadratic(R, phases):
    s = np.exp(1j * np.asarray(phases))
    total = 0j
    for k in range(len(s)):
        for l in range(len(s)):
            total += np.conj(s[k]) * R[k, l] * s[l]
    return total


class TestHermitianEig:
    def test_identity(self):
        eig = hermitian_eig(np.eye(2))
        np.testing.assert_allclose(eig.eigenvalues, [1, 1])

    def test_diagonal(self):
        eig = hermitian_eig(np.diag([1.0, 3.0]))
        np.testing.assert_allclose(eig.eigenvalues, [3, 1])
        np.testing.assert_allclose(np.abs(eig.eigenvectors), [[0, 1], [1, 0]], atol=1e-15)

    def test_two_by_two_hand_solved(self):
        # characteristic polynomial (2 - x)^2 - 1 = 0 -> x = 3, 1
        eig = hermitian_eig([[2, 1], [1, 2]])
        np.testing.assert_allclose(eig.eigenvalues, [3, 1], atol=1e-14)
        v1, v2 = eig.eigenvectors.T
        assert abs(abs(np.vdot(v1, [1, 1])) / np.sqrt(2) - 1) < 1e-12
        assert abs(abs(np.vdot(v2, [1, -1])) / np.sqrt(2) - 1) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            hermitian_eig([[1, 2], [0, 1]])

    def test_residual_and_orthonormality_on_1000_random(self, rng):
        for trial in range(1000):
            n = int(rng.integers(1, 65))
            H = random_hermitian(rng, n, scale=10 ** rng.uniform(-3, 3))
            eig = hermitian_eig(H)
            nrm = np.linalg.norm(H)
            U, w = eig.eigenvectors, eig.eigenvalues
            assert np.all(np.diff(w) <= 0)
            resid = np.linalg.norm(H @ U - U * w, axis=0)
            assert np.all(resid <= 1e-9 * nrm)
            assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-9 * np.sqrt(n)
            assert np.linalg.norm(eig.reconstruct() - H) <= 1e-9 * (1 + nrm)


class TestAsHermitian:
    def test_symmetrizes_round_off(self):
        A = np.array([[1.0, 2 + 1e-14j], [2, 1.0]])
        H = as_hermitian(A)
        assert np.array_equal(H, H.conj().T)
        assert np.all(H.diagonal().imag == 0)

    @pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), [[np.nan, 0], [0, 1]]])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            as_hermitian(bad)


class TestQuadraticForm:
    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_identity_gives_n(self, n, rng):
        assert quadratic_form(np.eye(n), random_phases(rng, n)) == pytest.approx(n)

    def test_all_ones_at_zero_phases(self):
        assert quadratic_form(np.ones((5, 5)), np.zeros(5)) == pytest.approx(25)

    def test_matches_naive_double_loop(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 9))
            R = random_hermitian(rng, n)
            phi = random_phases(rng, n)
            ref = naive_quadratic(R, phi)
            assert abs(ref.imag) <= 1e-10 * np.linalg.norm(R)
            assert quadratic_form(R, phi) == pytest.approx(ref.real, rel=1e-12, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            quadratic_form(np.eye(3), np.zeros(2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.floats(-50, 50), st.floats(0, 2 * np.pi), st.integers(0, 2**32 - 1))
    def test_shift_and_global_phase(self, n, lam, offset, seed):
        rng = np.random.default_rng(seed)
        R = random_hermitian(rng, n)
        phi = random_phases(rng, n)
        v = quadratic_form(R, phi)
        scale = 1 + abs(v) + abs(lam) * n
        assert quadratic_form(diagonal_load(R, lam), phi) == pytest.approx(v + lam * n, rel=1e-9, abs=1e-9 * scale)
        assert quadratic_form(R, phi + offset) == pytest.approx(v, rel=1e-10, abs=1e-10 * scale)


class TestHadamard:
    def test_with_all_ones(self, rng):
        A = random_hermitian(rng, 4)
        np.testing.assert_array_equal(hadamard(A, np.ones((4, 4))), A)

    def test_with_identity(self, rng):
        A = random_hermitian(rng, 4)
        np.testing.assert_array_equal(hadamard(A, np.eye(4)), np.diag(np.diag(A)))

    def test_outer_times_conjugate_is_ones(self, rng):
        s = unimodular(random_phases(rng, 6))
        S = np.outer(s, s.conj())
        np.testing.assert_allclose(hadamard(S, S.conj()), np.ones((6, 6)), atol=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hadamard(np.eye(2), np.eye(3))


class TestDiagonalLoad:
    def test_zero_load(self, rng):
        R = random_hermitian(rng, 3)
        np.testing.assert_allclose(diagonal_load(R, 0.0), R)

    def test_zero_matrix(self, rng):
        L = diagonal_load(np.zeros((4, 4)), 2.0)
        np.testing.assert_array_equal(L, 2 * np.eye(4))
        assert quadratic_form(L, random_phases(rng, 4)) == pytest.approx(8.0)

    def test_load_to_singular(self, rng):
        R = random_hermitian(rng, 6)
        L = diagonal_load(R, -hermitian_eig(R).sigma_min)
        assert abs(hermitian_eig(L).sigma_min) <= 1e-9 * (1 + np.linalg.norm(R))


class TestFrobeniusDistance:
    def test_equal(self, rng):
        A = random_hermitian(rng, 3)
        assert frobenius_distance(A, A) == 0.0

    def test_identity_vs_zero(self):
        assert frobenius_distance(np.eye(2), np.zeros((2, 2))) == pytest.approx(np.sqrt(2))

    def test_matches_naive(self, rng):
        A, B = random_hermitian(rng, 5), random_hermitian(rng, 5)
        naive = np.sqrt(sum(abs(A[i, j] - B[i, j]) ** 2 for i in range(5) for j in range(5)))
        assert frobenius_distance(A, B) == pytest.approx(naive, rel=1e-13)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            frobenius_distance(np.eye(2), np.eye(3))


class TestPhases:
    def test_phases_in_range(self, rng):
        phi = phases_of(unimodular(rng.uniform(-20, 20, 100)))
        assert np.all((phi >= 0) & (phi < 2 * np.pi))

    def test_tiny_negative_angle_wraps_to_zero(self):
        phi = phases_of(np.array([np.exp(-1e-18j)]))
        assert 0 <= phi[0] < 2 * np.pi


class TestMatrixFile:
    def test_round_trip(self, rng, tmp_path):
        R = random_hermitian(rng, 5)
        save_matrix(tmp_path / "m.json", R)
        np.testing.assert_array_equal(load_matrix(tmp_path / "m.json"), R)

    def test_document_shape(self):
        doc = matrix_to_json([[1, 2j], [-2j, 3]])
        assert doc["n"] == 2
        assert doc["entries_row_major"] == [[1, 0], [0, 2], [0, -2], [3, 0]]

    @pytest.mark.parametrize(
        "doc",
        [
            {"n": 2, "entries_row_major": [[1, 0]] * 3},
            {"n": 0, "entries_row_major": []},
            {"n": 2, "entries_row_major": [[1, 0], [1, 0], [0, 0], [1, 0]]},
            {"entries_row_major": []},
            {"n": 1, "entries_row_major": [[1, 0, 0]]},
        ],
    )
    def test_rejects_bad_documents(self, doc):
        with pytest.raises(ValueError):
            matrix_from_json(doc)

    def test_rejects_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ValueError):
            load_matrix(p)
