"""Matrix families and codes used to exercise the solvers.

Radar embeddings (SNR, Doppler CRLB), the clutter covariances of the three
benchmark cases, the ML-detection border embedding, matrices with prescribed
global optimizers, seeded random Gram matrices and Bjorck codes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_hermitian, as_phases, hermitian_eig, phases_of, unimodular

__all__ = [
    "ClutterParams",
    "RandomSpec",
    "bjorck",
    "clutter_case",
    "crlb_matrix",
    "hermitian_inverse",
    "is_prime",
    "legendre",
    "ml_embedding",
    "random_hermitian",
    "rank_one_phase",
    "snr_matrix",
    "steering",
    "theorem2_construct",
]


@dataclass(frozen=True)
class RandomSpec:
    n: int
    d: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.d < 1:
            raise ValueError("rank d must be >= 1")


@dataclass(frozen=True)
class ClutterParams:
    """Parameters of the three disturbance models (defaults are the benchmark values).

    ``target_doppler`` is the normalized Doppler ``f_d T_r`` of the target
    steering vector; ``T_r`` only scales the CRLB matrix.
    """

    eta: float = 0.8
    eta1: float = 0.8
    eta2: float = 0.9
    rho_doppler: float = 0.2
    n_c: int = 10
    eta_k: float = 1e3
    noise_eta: float = 1e-2
    target_doppler: float = 0.25
    T_r: float = 1.0

    def __post_init__(self):
        for name in ("eta", "eta1", "eta2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.n_c < 0:
            raise ValueError("n_c must be non-negative")


def random_hermitian(spec: RandomSpec) -> np.ndarray:
    """``sum_k x_k x_k^H`` over ``d`` vectors with i.i.d. N(0,1) real and imaginary parts."""
    rng = np.random.default_rng(spec.seed)
    X = rng.standard_normal((spec.n, spec.d)) + 1j * rng.standard_normal((spec.n, spec.d))
    R = X @ X.conj().T
    return 0.5 * (R + R.conj().T)


def steering(n: int, nu: float) -> np.ndarray:
    """Phases of ``(1, e^{j 2 pi nu}, ..., e^{j 2 pi (n-1) nu})``."""
    return np.mod(2.0 * np.pi * nu * np.arange(n), 2.0 * np.pi)


def hermitian_inverse(M) -> np.ndarray:
    """Inverse of a Hermitian positive definite matrix via its eigendecomposition."""
    eig = hermitian_eig(M)
    if not eig.sigma_min > 0:
        raise np.linalg.LinAlgError(f"matrix is not positive definite (sigma_min={eig.sigma_min:.3e})")
    U = eig.eigenvectors
    Minv = (U / eig.eigenvalues) @ U.conj().T
    Minv = 0.5 * (Minv + Minv.conj().T)
    n = Minv.shape[0]
    M = np.asarray(M, dtype=complex)
    resid = np.linalg.norm(M @ Minv - np.eye(n))
    if resid > 1e-9 * n:
        raise np.linalg.LinAlgError(f"inverse residual {resid:.3e} exceeds tolerance; M is too ill-conditioned")
    return Minv


def snr_matrix(M, p) -> np.ndarray:
    """``M^{-1} o conj(p p^H)``: code SNR is proportional to ``c^H R c``."""
    Minv = hermitian_inverse(M)
    z = unimodular(as_phases(p, Minv.shape[0]))
    return Minv * np.outer(z.conj(), z)


def crlb_matrix(M, p, T_r: float = 1.0) -> np.ndarray:
    """``M^{-1} o conj(pp^H) o conj(uu^H)`` with ``u = (0, j2pi T_r, ..., j2pi(n-1)T_r)``."""
    R = snr_matrix(M, p)
    n = R.shape[0]
    k = np.arange(n)
    u = 1j * 2.0 * np.pi * T_r * k
    return R * np.outer(u, u.conj()).conj()


def clutter_case(which: int, n: int, params: ClutterParams | None = None) -> np.ndarray:
    """Disturbance covariance ``M`` of benchmark case 1, 2 or 3."""
    params = params or ClutterParams()
    if n < 2:
        raise ValueError("n must be at least 2")
    k = np.arange(n)
    lag = k[:, None] - k[None, :]
    if which == 1:
        M = params.eta ** np.abs(lag)
    elif which == 2:
        M = (
            params.eta1 ** np.abs(lag) * np.exp(1j * 2.0 * np.pi * params.rho_doppler * lag)
            + 10.0 * params.eta2 ** np.abs(lag)
            + 1e-2 * np.eye(n)
        )
    elif which == 3:
        M = params.noise_eta * np.eye(n, dtype=complex)
        for i in range(params.n_c):
            z = unimodular(steering(n, i / 2.0))
            M = M + params.eta_k * np.outer(z, z.conj())
    else:
        raise ValueError(f"unknown clutter case {which!r}")
    return as_hermitian(np.asarray(M, dtype=complex))


def ml_embedding(Q, y) -> np.ndarray:
    """Border matrix ``[[Q^H Q, -Q^H y], [-y^H Q, 0]]``.

    Minimizing the UQP of this ``(n+1) x (n+1)`` matrix over ``(e^{jv} s, e^{jv})``
    minimizes ``||y - Q s||`` over unimodular ``s``.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    y = np.asarray(y, dtype=complex).reshape(-1)
    if Q.shape[0] != y.shape[0]:
        raise ValueError(f"Q has {Q.shape[0]} rows but y has length {y.shape[0]}")
    n = Q.shape[1]
    G = np.zeros((n + 1, n + 1), dtype=complex)
    G[:n, :n] = Q.conj().T @ Q
    b = Q.conj().T @ y
    G[:n, n] = -b
    G[n, :n] = -b.conj()
    return as_hermitian(G)


def rank_one_phase(R1, s_tilde) -> np.ndarray:
    """``R1 o (s s^H)``; for real non-negative symmetric ``R1`` its UQP optimum is ``s``."""
    R1 = np.asarray(R1, dtype=float)
    z = unimodular(as_phases(s_tilde, R1.shape[0]))
    return as_hermitian(R1 * np.outer(z, z.conj()))


def theorem2_construct(vectors, sigma) -> np.ndarray:
    """Hermitian matrix for which every given unimodular vector is a global optimizer.

    ``vectors`` holds ``k`` phase vectors of length ``n``; ``sigma`` holds ``n``
    descending eigenvalues whose first ``k`` entries are equal and strictly
    above the rest.  The top eigenspace is the span of the vectors
    (orthonormalized by QR), so each vector attains ``n * sigma[0]``.
    """
    V = np.column_stack([unimodular(as_phases(v)) for v in vectors])
    n, k = V.shape
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if sigma.shape[0] != n:
        raise ValueError(f"need {n} eigenvalues, got {sigma.shape[0]}")
    if k > n:
        raise ValueError("more vectors than the dimension")
    if np.any(np.diff(sigma) > 0):
        raise ValueError("sigma must be sorted descending")
    if not np.allclose(sigma[:k], sigma[0], rtol=0, atol=0) or (k < n and not sigma[0] > sigma[k]):
        raise ValueError("the top eigenvalue must be repeated exactly k times")
    U, T = np.linalg.qr(V, mode="complete")
    if np.min(np.abs(np.diag(T[:k, :k]))) < 1e-10 * np.sqrt(n):
        raise ValueError("vectors are linearly dependent")
    R = (U * sigma) @ U.conj().T
    return as_hermitian(R, tol=1e-9)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def legendre(k: int, p: int) -> int:
    """Legendre symbol ``(k/p)`` for an odd prime ``p``, via Euler's criterion."""
    r = pow(k % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def bjorck(p: int) -> np.ndarray:
    """Phases of the Bjorck code ``b(k) = exp(j (k/p) arccos(1/(1+sqrt p)))``, ``0 <= k < p``."""
    if not is_prime(p) or p % 4 != 1:
        raise ValueError(f"Bjorck codes need a prime p = 1 (mod 4), got {p}")
    theta = np.arccos(1.0 / (1.0 + np.sqrt(p)))
    symbols = np.array([legendre(k, p) for k in range(p)], dtype=float)
    return phases_of(unimodular(symbols * theta))
