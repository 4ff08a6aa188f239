"""Dense complex-Hermitian primitives shared by the solver modules.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Unimodular
vectors are carried around as real arrays of phases (radians); use
:func:`unimodular` and :func:`phases_of` to move between the two views.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "HERMITIAN_TOL",
    "EigenSystem",
    "as_hermitian",
    "as_phases",
    "diagonal_load",
    "frobenius_distance",
    "hadamard",
    "hermitian_eig",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "phases_of",
    "quadratic_form",
    "save_matrix",
    "unimodular",
]

TWO_PI = 2.0 * np.pi

# relative part of the hybrid symmetry tolerance tol * (1 + ||A||_F)
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted descending with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def sigma_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def sigma_min(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def as_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``A`` as Hermitian and return its symmetrized complex copy.

    Asymmetry up to ``tol * (1 + ||A||_F)`` is treated as round-off and
    removed by ``(A + A^H) / 2``; anything larger raises ``ValueError``.
    """
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    asym = np.max(np.abs(A - A.conj().T))
    if asym > tol * (1.0 + np.linalg.norm(A)):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    return 0.5 * (A + A.conj().T)


def as_phases(s, n: int | None = None) -> np.ndarray:
    """Coerce a phase vector to a 1-D float array, optionally checking length."""
    phi = np.asarray(s, dtype=float).reshape(-1)
    if n is not None and phi.shape[0] != n:
        raise ValueError(f"phase vector has length {phi.shape[0]}, expected {n}")
    if not np.all(np.isfinite(phi)):
        raise ValueError("phase vector has non-finite entries")
    return phi


def unimodular(phases) -> np.ndarray:
    """``exp(1j * phases)``."""
    return np.exp(1j * np.asarray(phases, dtype=float))


def phases_of(z) -> np.ndarray:
    """Phases of the complex entries of ``z`` reduced to ``[0, 2*pi)``."""
    phi = np.mod(np.angle(z), TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative angles
    phi[phi >= TWO_PI] = 0.0
    return phi


def hermitian_eig(H) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    H = as_hermitian(H)
    w, U = np.linalg.eigh(H)
    order = np.argsort(w)[::-1]
    return EigenSystem(eigenvalues=w[order], eigenvectors=U[:, order])


def quadratic_form(R, s) -> float:
    """Real value of ``s^H R s`` for the unimodular vector with phases ``s``."""
    R = np.asarray(R, dtype=complex)
    z = unimodular(as_phases(s, R.shape[0]))
    return float(np.real(np.vdot(z, R @ z)))


def hadamard(A, B) -> np.ndarray:
    """Element-wise product of two equally shaped matrices."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return A * B


def diagonal_load(R, lam: float) -> np.ndarray:
    """``R + lam * I``.  Shifts every UQP objective by ``lam * n``."""
    R = as_hermitian(R)
    return R + lam * np.eye(R.shape[0])


def frobenius_distance(A, B) -> float:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B))


# -- matrix file format -------------------------------------------------------


def matrix_to_json(R) -> dict:
    R = as_hermitian(R)
    n = R.shape[0]
    flat = R.reshape(-1)
    return {
        "n": int(n),
        "entries_row_major": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    """Parse ``{"n": n, "entries_row_major": [[re, im], ...]}``."""
    try:
        n = doc["n"]
        pairs = doc["entries_row_major"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix document: missing {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(pairs, list) or len(pairs) != n * n:
        count = len(pairs) if isinstance(pairs, list) else "non-list"
        raise ValueError(f"expected {n * n} entries, got {count}")
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (n * n, 2):
        raise ValueError("each entry must be a [re, im] pair")
    R = (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)
    return as_hermitian(R)


def save_matrix(path, R) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(R)) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return matrix_from_json(doc)
