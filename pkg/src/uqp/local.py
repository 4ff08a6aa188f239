"""Power-method-like local ascent for unimodular quadratic programs.

The iteration ``s <- exp(j arg(R s))`` is cyclic maximization of the relaxed
bilinear objective ``Re(s1^H R s2)``; for positive definite ``R`` the UQP
objective increases strictly until a fixed point (a *hyper point*, where
``arg(s) == arg(R s)``) is reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_hermitian, as_phases, phases_of, unimodular

__all__ = [
    "DEGENERATE_TOL",
    "DegeneratePhaseError",
    "LocalConfig",
    "LocalTrace",
    "is_hyper_point",
    "local_optimize",
    "power_step",
]

# |(R s)_k| below DEGENERATE_TOL * (1 + ||R||_F) leaves arg undefined
DEGENERATE_TOL = 1e-14


class DegeneratePhaseError(ArithmeticError):
    """An entry of ``R s`` vanished, so its phase is undefined."""


@dataclass(frozen=True)
class LocalConfig:
    """Stopping rules for :func:`local_optimize`.

    ``max_iterations=None`` means ``1000 * n``.  ``objective_tolerance``
    enables an extra early exit on small objective gain; it is off by
    default because it fires roughly ``sqrt(tol)`` radians short of the fixed
    point.
    """

    max_iterations: int | None = None
    phase_tolerance: float = 1e-10
    objective_tolerance: float | None = None

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not self.phase_tolerance > 0:
            raise ValueError("phase_tolerance must be positive")
        if self.objective_tolerance is not None and not self.objective_tolerance > 0:
            raise ValueError("objective_tolerance must be positive")


@dataclass
class LocalTrace:
    """Per-iteration record of a local solve.

    ``objectives[0]`` is the value at the start point; ``objectives[t]`` is
    ``s_t^H R s_t`` for the caller's matrix.  ``ruqp[t]`` is
    ``Re(s_{t+1}^H W s_t)`` and ``gaps[t]`` is ``||s_{t+1} - s_t||^2``, where
    ``W = R + loading * I`` is the positive definite matrix actually iterated.
    """

    objectives: list = field(default_factory=list)
    ruqp: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    phase_steps: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    loading: float = 0.0
    sigma_min: float = float("nan")


def _phase_update(W: np.ndarray, z: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    y = W @ z
    mag = np.abs(y)
    if mag.min() < DEGENERATE_TOL * (1.0 + scale):
        k = int(np.argmin(mag))
        raise DegeneratePhaseError(f"|(R s)_{k}| = {mag[k]:.3e}; phase undefined")
    return y, y / mag


def power_step(R, s) -> np.ndarray:
    """One iteration ``exp(j arg(R s))``, returned as phases in ``[0, 2*pi)``."""
    R = np.asarray(R, dtype=complex)
    z = unimodular(as_phases(s, R.shape[0]))
    _, z_new = _phase_update(R, z, np.linalg.norm(R))
    return phases_of(z_new)


def is_hyper_point(R, s, tol: float = 1e-8) -> bool:
    """True when ``arg(s) == arg(R s)`` component-wise within ``tol`` radians."""
    R = np.asarray(R, dtype=complex)
    z = unimodular(as_phases(s, R.shape[0]))
    y, _ = _phase_update(R, z, np.linalg.norm(R))
    return bool(np.max(np.abs(np.angle(y * z.conj()))) <= tol)


def pd_loading(R: np.ndarray, sigma_min: float | None = None) -> float:
    """Diagonal loading that makes ``R`` positive definite (0 if it already is)."""
    if sigma_min is None:
        sigma_min = float(np.linalg.eigvalsh(R)[0])
    if sigma_min > 0:
        return 0.0
    return -sigma_min + 1e-6 * (1.0 + np.linalg.norm(R))


def _iterate_fast(W: np.ndarray, z: np.ndarray, max_it: int, tol: float, scale: float) -> tuple[np.ndarray, int, bool]:
    for it in range(1, max_it + 1):
        _, z_new = _phase_update(W, z, scale)
        step = np.max(np.abs(np.angle(z_new * z.conj())))
        z = z_new
        if step <= tol:
            return z, it, True
    return z, max_it, False


def local_optimize(R, s0, cfg: LocalConfig | None = None, *, validate: bool = True, record: bool = True):
    """Run the phase iteration from ``s0`` until the phases stop moving.

    If ``R`` is not positive definite it is diagonally loaded first; the
    maximizer is unaffected and the recorded objectives stay in terms of
    the caller's ``R``.

    ``record=False`` skips the per-iteration bookkeeping (the trace then only
    carries ``iterations``, ``converged``, ``loading`` and ``sigma_min``).

    Returns
    -------
    phases : ndarray
        Final iterate in ``[0, 2*pi)``.  On hitting ``max_iterations`` this is
        the best iterate seen and ``trace.converged`` is False.
    trace : LocalTrace
    """
    cfg = cfg or LocalConfig()
    R = as_hermitian(R) if validate else np.asarray(R, dtype=complex)
    n = R.shape[0]
    z = unimodular(as_phases(s0, n))
    sigma_min = float(np.linalg.eigvalsh(R)[0])
    lam = pd_loading(R, sigma_min)
    W = R + lam * np.eye(n) if lam else R
    scale = float(np.linalg.norm(W))

    max_it = cfg.max_iterations or 1000 * n
    trace = LocalTrace(loading=lam, sigma_min=sigma_min + lam)
    if not record and cfg.objective_tolerance is None:
        # ascent is monotone for positive definite W, so the last iterate is the best
        z, trace.iterations, trace.converged = _iterate_fast(W, z, max_it, cfg.phase_tolerance, scale)
        return phases_of(z), trace
    obj = float(np.real(np.vdot(z, R @ z)))
    trace.objectives.append(obj)
    best_z, best_obj = z, obj

    for _ in range(max_it):
        y, z_new = _phase_update(W, z, scale)
        step = float(np.max(np.abs(np.angle(z_new * z.conj()))))
        trace.ruqp.append(float(np.sum(np.abs(y))))
        trace.gaps.append(float(np.sum(np.abs(z_new - z) ** 2)))
        trace.phase_steps.append(step)
        new_obj = float(np.real(np.vdot(z_new, R @ z_new)))
        trace.objectives.append(new_obj)
        trace.iterations += 1
        gain = new_obj - obj
        z, obj = z_new, new_obj
        if obj >= best_obj:
            best_z, best_obj = z, obj
        if step <= cfg.phase_tolerance:
            trace.converged = True
            break
        if cfg.objective_tolerance is not None and 0 <= gain <= cfg.objective_tolerance * (1.0 + abs(obj)):
            trace.converged = True
            break

    final = z if trace.converged else best_z
    return phases_of(final), trace
