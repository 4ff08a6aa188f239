import itertools

import numpy as np
import pytest

from conftest import align, random_hermitian, random_pd, random_phases
from uqp.cone import (
    complement_basis,
    cone_sequence,
    dominance_rho,
    project_P1,
    project_Q1,
    r_plus,
    rho_floor,
    transport,
)
from uqp.linalg import quadratic_form, unimodular
from uqp.local import local_optimize
from uqp.merit import MeritConfig, merit
from uqp.oracle import brute_force


def hyper_instance(rng, n_max=16):
    n = int(rng.integers(2, n_max + 1))
    R = random_pd(rng, n)
    s, trace = local_optimize(R, random_phases(rng, n))
    assert trace.converged
    return R, s


class TestTransport:
    def test_same_vector_is_identity(self, rng):
        R = random_hermitian(rng, 4)
        s = random_phases(rng, 4)
        np.testing.assert_allclose(transport(R, s, s), R, atol=1e-15)

    def test_nonnegative_matrix_from_ones(self, rng):
        R = np.abs(random_hermitian(rng, 5))
        s2 = random_phases(rng, 5)
        out = transport(R, np.zeros(5), s2)
        assert quadratic_form(out, s2) == pytest.approx(quadratic_form(R, np.zeros(5)), rel=1e-13)

    def test_exhaustive_small_grid(self, rng):
        R = random_hermitian(rng, 3)
        s1 = 2 * np.pi * np.array([0, 1, 3]) / 4
        v = quadratic_form(R, s1)
        count = 0
        for digits in itertools.product(range(4), repeat=3):
            s2 = 2 * np.pi * np.array(digits) / 4
            assert quadratic_form(transport(R, s1, s2), s2) == pytest.approx(v, abs=1e-10)
            count += 1
        assert count == 64


class TestRPlusAndFloor:
    def test_nonnegative_matrix_at_ones(self, rng):
        R = np.abs(random_hermitian(rng, 4))
        Rp, mask = r_plus(R, np.zeros(4))
        assert mask.all()
        np.testing.assert_allclose(Rp, R)
        assert rho_floor(R, np.zeros(4)) == 0.0

    def test_opposite_phase_is_outside(self):
        R = np.array([[1.0, -1.0], [-1.0, 1.0]])
        Rp, mask = r_plus(R, [0.0, 0.0])
        np.testing.assert_allclose(Rp, np.eye(2))
        assert not mask[0, 1]
        assert rho_floor(R, [0.0, 0.0]) == pytest.approx(1.0)

    def test_quarter_phase_entry(self):
        r = 2.5
        R = np.array([[1, r * np.exp(1j * np.pi / 4)], [r * np.exp(-1j * np.pi / 4), 1]])
        Rp, _ = r_plus(R, [0.0, 0.0])
        assert Rp[0, 1] == pytest.approx(r * np.cos(np.pi / 4))

    def test_boundary_gap_is_excluded(self):
        R = np.array([[1, 1j], [-1j, 1]])
        _, mask = r_plus(R, [0.0, 0.0])
        assert not mask[0, 1] and not mask[1, 0]

    def test_matches_naive_scan(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            R = random_hermitian(rng, n)
            phi = random_phases(rng, n)
            Rp, mask = r_plus(R, phi)
            floor = 0.0
            for k in range(n):
                for l in range(n):
                    gap = np.angle(R[k, l]) - (phi[k] - phi[l])
                    gap = np.angle(np.exp(1j * gap))
                    val = abs(R[k, l]) * np.cos(gap)
                    if abs(gap) < np.pi / 2:
                        assert mask[k, l] and Rp[k, l] == pytest.approx(val, abs=1e-12)
                    else:
                        assert not mask[k, l] and Rp[k, l] == 0
                        floor = max(floor, abs(val))
            assert rho_floor(R, phi) == pytest.approx(floor, abs=1e-12)


class TestConeSequence:
    def test_nonnegative_matrix_at_ones(self, rng):
        n, rho = 5, 0.7
        R = np.abs(random_hermitian(rng, n))
        seq = cone_sequence(R, np.zeros(n), rho)
        np.testing.assert_allclose(seq.matrices[1], rho * np.ones((n, n)), atol=1e-14)
        np.testing.assert_allclose(seq.limit, rho * np.ones((n, n)), atol=1e-14)
        np.testing.assert_allclose(seq.limit @ np.ones(n), n * rho * np.ones(n), atol=1e-13)
        assert dominance_rho(seq) == pytest.approx(0.0, abs=1e-13)

    def test_rejects_rho_at_floor(self):
        R = np.array([[1.0, -1.0], [-1.0, 1.0]])
        with pytest.raises(ValueError):
            cone_sequence(R, [0.0, 0.0], 1.0)

    def test_sequence_identities_on_random_hyper_points(self, rng):
        for _ in range(100):
            R, s = hyper_instance(rng)
            n = R.shape[0]
            nrm = np.linalg.norm(R)
            rho = rho_floor(R, s) + rng.uniform(0.1, 2.0)
            seq = cone_sequence(R, s, rho)
            R0, R1, R2 = seq.matrices
            z = unimodular(s)
            S = np.outer(z, z.conj())
            # two-step convergence
            from uqp.cone import cone_update

            R3, _ = cone_update(R2, s, rho)
            assert np.linalg.norm(R3 - R2) <= 1e-12 * (1 + nrm)
            # eigenpair (s, n rho)
            assert np.linalg.norm(R2 @ z - n * rho * z) <= 1e-9 * np.linalg.norm(R2)
            # rho shift
            seq2 = cone_sequence(R, s, rho + 1.0)
            assert np.linalg.norm(seq2.limit - seq.limit - S) <= 1e-10 * (1 + nrm)
            # reconstruction
            Rp0, Rp1 = seq.r_plus
            recon = R2 + (Rp0 + Rp1) * S
            assert np.linalg.norm(R + 2 * rho * S - recon) <= 1e-10 * (1 + nrm)

    def test_dominance_threshold(self, rng):
        for _ in range(20):
            R, s = hyper_instance(rng, 10)
            n = R.shape[0]
            rho = rho_floor(R, s) + 0.5
            seq = cone_sequence(R, s, rho)
            z = unimodular(s) / np.sqrt(n)
            w, V = np.linalg.eigh(seq.limit)
            # oracle: deflate the s direction from the spectrum
            others = [w[i] for i in range(n) if abs(np.vdot(V[:, i], z)) < 0.5]
            mu_ref = max(others) if len(others) == n - 1 else None
            mu = dominance_rho(seq) * n
            if mu_ref is not None:
                assert mu == pytest.approx(mu_ref, abs=1e-9 * (1 + np.linalg.norm(R)))
            # rho above mu/n makes s dominant
            big = max(rho, dominance_rho(seq)) + 1e-6
            limit = cone_sequence(R, s, big).limit
            w2, V2 = np.linalg.eigh(limit)
            assert abs(np.vdot(V2[:, -1], z)) == pytest.approx(1.0, abs=1e-6)

    def test_dominance_shift_by_loading(self, rng):
        n, rho, lam = 4, 0.3, 0.8
        R = np.abs(random_hermitian(rng, n))
        seq = cone_sequence(R, np.zeros(n), rho)
        loaded = seq.limit + lam * np.eye(n)
        shifted = type(seq)(s=seq.s, rho=rho, matrices=(R, seq.matrices[1], loaded), r_plus=seq.r_plus,
                            theta_set=seq.theta_set)
        assert dominance_rho(shifted) - dominance_rho(seq) == pytest.approx(lam / n)


def feasible_perturbation(rng, Q, n):
    """Random Hermitian direction keeping 1 as an eigenvector and dominant after a 1e-3 step."""
    B = complement_basis(np.ones(n) / np.sqrt(n))
    Y = random_hermitian(rng, n - 1)
    D = rng.standard_normal() * np.ones((n, n)) / n + B @ Y @ B.conj().T
    return D


class TestProjectQ1:
    def test_scaled_ones(self):
        out = project_Q1(2.5 * np.ones((4, 4)))
        np.testing.assert_allclose(out, 2.5 * np.ones((4, 4)), atol=1e-13)

    def test_identity(self):
        np.testing.assert_allclose(project_Q1(np.eye(5)), np.eye(5), atol=1e-13)

    def test_output_in_cone(self, rng):
        for mode in ("exact", "projector"):
            for _ in range(20):
                n = int(rng.integers(2, 10))
                Q = project_Q1(random_hermitian(rng, n), mode)
                one = np.ones(n)
                rho = np.real(Q @ one)[0]
                np.testing.assert_allclose(Q @ one, rho * one, atol=1e-10)
                assert np.linalg.eigvalsh(Q)[-1] <= rho + 1e-10

    def test_perturbation_oracle(self, rng):
        eps = 1e-3
        for _ in range(10):
            n = int(rng.integers(2, 9))
            RQ = random_hermitian(rng, n)
            Q = project_Q1(RQ)
            base = np.linalg.norm(RQ - Q)
            tried = 0
            while tried < 100:
                D = feasible_perturbation(rng, Q, n)
                cand = Q + eps * D
                one = np.ones(n)
                rho = np.real(cand @ one)[0] / 1.0
                if np.linalg.eigvalsh(cand)[-1] > rho + 1e-12:
                    continue
                tried += 1
                assert np.linalg.norm(RQ - cand) >= base - 1e-9

    def test_projector_mode_agrees_when_no_clipping(self, rng):
        n = 5
        RQ = random_hermitian(rng, n) + 10 * np.ones((n, n))
        np.testing.assert_allclose(project_Q1(RQ, "projector"), project_Q1(RQ, "exact"), atol=1e-12)

    def test_projector_mode_form(self, rng):
        n = 6
        RQ = random_hermitian(rng, n)
        Q = project_Q1(RQ, "projector")
        rho = np.real(Q.sum()) / n
        Pc = np.eye(n) - np.ones((n, n)) / n
        ref = rho * np.eye(n) + Pc @ (RQ - rho * np.eye(n)) @ Pc
        np.testing.assert_allclose(Q, ref, atol=1e-12)

    def test_exact_never_worse_than_projector(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 10))
            RQ = random_hermitian(rng, n)
            assert np.linalg.norm(RQ - project_Q1(RQ)) <= np.linalg.norm(RQ - project_Q1(RQ, "projector")) + 1e-12

    def test_rejects_non_hermitian_and_bad_mode(self):
        with pytest.raises(ValueError):
            project_Q1([[1, 2], [0, 1]])
        with pytest.raises(ValueError):
            project_Q1(np.eye(2), "fast")


class TestProjectP1:
    def test_nonnegative_unchanged(self, rng):
        A = np.abs(random_hermitian(rng, 4))
        np.testing.assert_allclose(project_P1(A), A)

    def test_negative_diagonal_kept(self):
        np.testing.assert_array_equal(project_P1(-np.eye(3)), -np.eye(3))

    def test_elementwise_rule(self):
        out = project_P1(np.array([[1, -2 + 1j], [-2 - 1j, 3]]))
        np.testing.assert_array_equal(out, [[1, 0], [0, 3]])
        assert out.dtype.kind == "f"


def test_cone_closure_under_combination(rng):
    n, m = 4, 16
    for _ in range(3):
        s = 2 * np.pi * rng.integers(0, m, n) / m
        s = s - s[0]
        z = unimodular(s)
        mats = []
        for _ in range(2):
            P = np.abs(random_hermitian(rng, n))
            R = P * np.outer(z, z.conj())
            rep = merit(R, MeritConfig(seed=1))
            assert rep.gamma == 1.0
            assert np.max(np.abs(align(rep.s, s))) <= 1e-6
            mats.append(R)
        g1, g2 = rng.uniform(0, 3, 2)
        res = brute_force(g1 * mats[0] + g2 * mats[1], m)
        assert np.max(np.abs(align(res.s, s))) <= 1e-9
