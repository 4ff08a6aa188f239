"""Exhaustive m-UQP solver for small instances (ground truth for certificates)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_hermitian, quadratic_form
from .local import LocalConfig, local_optimize

__all__ = ["MAX_CANDIDATES", "OracleResult", "brute_force", "refine"]

MAX_CANDIDATES = 10**8
_CHUNK = 1 << 15


@dataclass(frozen=True)
class OracleResult:
    s: np.ndarray
    value: float
    evaluations: int


def brute_force(R, m: int, *, fix_first: bool = True) -> OracleResult:
    """Maximize ``s^H R s`` over ``s`` with entries in the ``m``-th roots of unity.

    With ``fix_first`` (default) the first entry is pinned to 1, which loses
    nothing because the objective ignores a common phase.  Candidates are
    visited in lexicographic order of their phase indices and the first
    maximizer wins ties.
    """
    R = as_hermitian(R)
    n = R.shape[0]
    if m < 1:
        raise ValueError("m must be positive")
    free = n - 1 if fix_first else n
    count = m**free
    if count > MAX_CANDIDATES:
        raise ValueError(f"{count} candidates exceeds the limit of {MAX_CANDIDATES}")
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    place = m ** np.arange(free - 1, -1, -1)
    Rt = R.T
    best_val = -np.inf
    best_digits = None
    for start in range(0, count, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, count))
        digits = (idx[:, None] // place) % m
        Z = roots[digits]
        if fix_first:
            Z = np.hstack([np.ones((Z.shape[0], 1)), Z])
        vals = np.real(np.einsum("ck,ck->c", Z.conj(), Z @ Rt))
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_digits = digits[k]
    if fix_first:
        best_digits = np.concatenate([[0], best_digits])
    phases = 2.0 * np.pi * best_digits / m
    return OracleResult(s=phases, value=quadratic_form(R, phases), evaluations=count)


def refine(R, result: OracleResult, cfg: LocalConfig | None = None) -> tuple[np.ndarray, float]:
    """Polish a grid optimum with the continuous phase iteration."""
    R = as_hermitian(R)
    phases, _ = local_optimize(R, result.s, cfg)
    value = quadratic_form(R, phases)
    if value < result.value:
        return result.s.copy(), result.value
    return phases, value
