"""Matrices with a known UQP maximizer and the projections onto them.

Three families show up here:

* ``transport`` moves a matrix between the cones ``K(s1)`` and ``K(s2)`` of
  matrices maximized by ``s1`` and ``s2`` without changing objective values.
* The sequence ``R(t+1) = R(t) - (R_plus(t) - rho * 11^T) o ss^H`` splits a
  matrix with hyper point ``s`` into a part with dominant eigenvector ``s``
  and a non-negative part in the ``s``-frame.  It settles after two updates.
* ``project_Q1`` / ``project_P1`` are the nearest-matrix maps onto the cone
  with dominant eigenvector ``1`` and onto real symmetric matrices with
  non-negative off-diagonal entries (diagonal unconstrained).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import as_hermitian, as_phases, unimodular

__all__ = [
    "ConeDecomposition",
    "ConeSequence",
    "complement_basis",
    "cone_sequence",
    "cone_update",
    "dominance_rho",
    "project_P1",
    "project_Q1",
    "r_plus",
    "rho_floor",
    "transport",
]


@dataclass(frozen=True)
class ConeSequence:
    s: np.ndarray
    rho: float
    matrices: tuple
    r_plus: tuple
    theta_set: np.ndarray

    @property
    def limit(self) -> np.ndarray:
        return self.matrices[2]


@dataclass(frozen=True)
class ConeDecomposition:
    """``R + alpha0 * ss^H ~ (Q1 + P1) o ss^H``, with ``residual = ||E||_F``."""

    Q1: np.ndarray
    P1: np.ndarray
    alpha0: float
    residual: float

    @property
    def rho(self) -> float:
        n = self.Q1.shape[0]
        return float(np.real(self.Q1.sum()) / n)


def transport(R, s1, s2) -> np.ndarray:
    """Map ``R`` to ``R o (s0 s0^H)`` with ``s0 = conj(s1) o s2``.

    ``s2^H out s2 == s1^H R s1``, so ``R in K(s1)`` iff ``out in K(s2)``.
    """
    R = as_hermitian(R)
    n = R.shape[0]
    s0 = unimodular(as_phases(s2, n) - as_phases(s1, n))
    return R * np.outer(s0, s0.conj())


def _frame(R: np.ndarray, s) -> tuple[np.ndarray, np.ndarray]:
    """``R o conj(ss^H)``: entry (k, l) is ``R(k,l) exp(-j(phi_k - phi_l))``."""
    z = unimodular(as_phases(s, R.shape[0]))
    return R * np.outer(z.conj(), z), z


def r_plus(R, s) -> tuple[np.ndarray, np.ndarray]:
    """Positive in-phase part of ``R`` relative to ``s`` and the mask Theta.

    Theta holds the pairs whose phase gap ``theta_kl - (phi_k - phi_l)`` is
    strictly inside ``(-pi/2, pi/2)``; there the entry is
    ``|R(k,l)| cos(gap)``, elsewhere zero.
    """
    R = np.asarray(R, dtype=complex)
    c, _ = _frame(R, s)
    mask = np.abs(np.angle(c)) < np.pi / 2
    return np.where(mask, c.real, 0.0), mask


def rho_floor(R, s) -> float:
    """Largest ``|R(k,l) cos(gap)|`` outside Theta (0 when Theta is everything)."""
    R = np.asarray(R, dtype=complex)
    c, _ = _frame(R, s)
    outside = ~(np.abs(np.angle(c)) < np.pi / 2)
    if not outside.any():
        return 0.0
    return float(np.max(np.abs(c.real[outside])))


def cone_update(Rt, s, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """One step ``R(t) - (R_plus(t) - rho 11^T) o ss^H``; also returns ``R_plus(t)``."""
    Rt = np.asarray(Rt, dtype=complex)
    Rp, _ = r_plus(Rt, s)
    z = unimodular(as_phases(s, Rt.shape[0]))
    return Rt - (Rp - rho) * np.outer(z, z.conj()), Rp


def cone_sequence(R, s, rho: float) -> ConeSequence:
    """``R(0) = R``, ``R(1)``, ``R(2)`` for an admissible ``rho``.

    ``s`` is expected to be a hyper point of ``R`` (not checked here); then
    ``R(2) s = n rho s``.
    """
    R = as_hermitian(R)
    phi = as_phases(s, R.shape[0])
    floor = rho_floor(R, phi)
    if not rho > floor:
        raise ValueError(f"rho={rho!r} must exceed the floor {floor!r}")
    _, mask = r_plus(R, phi)
    R1, Rp0 = cone_update(R, phi, rho)
    R2, Rp1 = cone_update(R1, phi, rho)
    return ConeSequence(
        s=phi, rho=float(rho), matrices=(R, R1, R2), r_plus=(Rp0, Rp1), theta_set=mask
    )


@lru_cache(maxsize=64)
def _ones_complement(n: int) -> np.ndarray:
    B = complement_basis(np.ones(n) / np.sqrt(n))
    B.setflags(write=False)
    return B


def complement_basis(u) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of unit vector ``u``."""
    u = np.asarray(u).reshape(-1, 1)
    Qc, _ = np.linalg.qr(u, mode="complete")
    return Qc[:, 1:]


def dominance_rho(seq: ConeSequence) -> float:
    """``mu / n`` where ``mu`` is the top eigenvalue of ``R(2)`` off the ``s`` direction.

    Any ``rho >= mu / n`` makes ``s`` a dominant eigenvector of ``R(2)``.
    """
    R2 = seq.limit
    n = R2.shape[0]
    if n == 1:
        return 0.0
    z = unimodular(seq.s) / np.sqrt(n)
    B = complement_basis(z)
    mu = np.linalg.eigvalsh(B.conj().T @ R2 @ B)[-1]
    return float(mu / n)


def _clip_level(h: float, z: np.ndarray) -> float:
    """Minimizer of ``(rho - h)^2 + sum((z_i - rho)_+^2)``; ``z`` descending."""
    if z.size == 0 or h >= z[0]:
        return h
    csum = h
    for k in range(z.size):
        csum += z[k]
        rho = csum / (k + 2)
        nxt = z[k + 1] if k + 1 < z.size else -np.inf
        if nxt <= rho <= z[k]:
            return rho
    return csum / (z.size + 1)


def project_Q1(R_Q, mode: str = "exact") -> np.ndarray:
    """Nearest matrix (Frobenius) whose dominant eigenvector is the all-ones vector.

    Any such matrix is ``rho 11^T/n + B Z B^H`` with ``B`` spanning the
    complement of ``1`` and ``lambda_max(Z) <= rho``.  With ``h = 1^T R_Q 1 / n``
    and ``Z0 = B^H R_Q B``:

    ``mode="projector"`` keeps ``Z = Z0`` and sets ``rho = max(h, lambda_max(Z0))``,
    i.e. the best member of the one-parameter family
    ``rho I + (I - 11^T/n)(R_Q - rho I)(I - 11^T/n)``.

    ``mode="exact"`` (default) also clips the eigenvalues of ``Z0`` at a
    common level ``rho``, which is the true Euclidean projection onto the
    cone.  The two agree whenever ``h >= lambda_max(Z0)``.
    """
    R_Q = as_hermitian(R_Q)
    n = R_Q.shape[0]
    h = float(np.real(R_Q.sum())) / n
    if n == 1:
        return np.array([[h]], dtype=complex)
    B = _ones_complement(n)
    Z0 = B.conj().T @ R_Q @ B
    w, V = np.linalg.eigh(0.5 * (Z0 + Z0.conj().T))
    w, V = w[::-1], V[:, ::-1]
    if mode == "projector":
        rho = h if h >= w[0] else float(w[0])
        Z = Z0
    elif mode == "exact":
        rho = _clip_level(h, w)
        Z = (V * np.minimum(w, rho)) @ V.conj().T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ones = np.full((n, n), 1.0 / n)
    Q = rho * ones + B @ Z @ B.conj().T
    return 0.5 * (Q + Q.conj().T)


def project_P1(R_P) -> np.ndarray:
    """Real part of ``R_P`` with negative off-diagonal entries set to zero."""
    P = np.real(np.asarray(R_P, dtype=complex)).copy()
    off = ~np.eye(P.shape[0], dtype=bool)
    P[off & (P < 0)] = 0.0
    return 0.5 * (P + P.T)
