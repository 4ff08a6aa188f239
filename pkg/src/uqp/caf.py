"""Cross-ambiguity-function (CAF) synthesis with a unimodular transmit code.

The transmit signal and receive filter are ``u(t) = sum_k x_k p_k(t)`` and
``v(t) = sum_k y_k p_k(t)`` with unit-energy rectangular sub-pulses, so

    chi(tau, f) = int u(t) v*(t + tau) e^{j 2 pi f t} dt = y^H J(tau, f) x.

The fit ``g = sum_grid w |d e^{j phi} - y^H J x|^2`` is minimized cyclically:
``phi`` in closed form, ``y`` by weighted least squares and ``x`` through a
bordered UQP solved by the local phase iteration or by MERIT.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import as_phases, phases_of, unimodular
from .local import LocalConfig, local_optimize
from .merit import MeritConfig, merit_zero
from .scenarios import bjorck, ml_embedding

__all__ = [
    "CafGrid",
    "CafState",
    "PulseBasis",
    "caf_cycle",
    "caf_synthesize",
    "caf_value",
    "criterion",
    "j_matrix",
    "sidelobe_level",
    "thumbtack_grid",
    "write_outputs",
]

SOLVERS = ("local", "merit")


@dataclass(frozen=True)
class PulseBasis:
    """``n`` unit-energy rectangles; pulse ``k`` lives on ``[k t_p, (k+1) t_p]`` (0-based)."""

    n: int
    t_p: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.t_p > 0:
            raise ValueError("t_p must be positive")

    @property
    def duration(self) -> float:
        return self.n * self.t_p


def _overlap_integral(a, b, f, t_p):
    """``(1/t_p) int_a^b e^{j 2 pi f t} dt`` for ``a <= b`` (broadcasting)."""
    if f == 0:
        return (b - a) / t_p
    w = 2j * np.pi * f
    return (np.exp(w * b) - np.exp(w * a)) / (w * t_p)


def j_matrix(tau: float, f: float, basis: PulseBasis) -> np.ndarray:
    """``J[l, k] = int p_k(t) p_l(t + tau) e^{j 2 pi f t} dt`` so that ``chi = y^H J x``.

    ``p_l(t + tau)`` is supported on ``[l t_p - tau, (l+1) t_p - tau]``; the
    entry integrates the exponential over its overlap with pulse ``k``.
    """
    n, t_p = basis.n, basis.t_p
    k = np.arange(n)
    start_k = k * t_p
    start_l = k * t_p - tau
    a = np.maximum(start_k[None, :], start_l[:, None])
    b = np.minimum(start_k[None, :] + t_p, start_l[:, None] + t_p)
    J = np.zeros((n, n), dtype=complex)
    hit = b > a
    if np.any(hit):
        J[hit] = _overlap_integral(a[hit], b[hit], f, t_p)
    return J


def caf_value(x, y, tau: float, f: float, basis: PulseBasis) -> complex:
    """``chi(tau, f)`` for code ``x`` (phases or complex) and filter ``y`` (complex)."""
    x = _as_code(x, basis.n)
    y = np.asarray(y, dtype=complex).reshape(-1)
    return complex(np.vdot(y, j_matrix(tau, f, basis) @ x))


def _as_code(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        x = x.reshape(-1).astype(complex)
        if x.shape[0] != n:
            raise ValueError(f"expected length {n}, got {x.shape[0]}")
        return x
    return unimodular(as_phases(x, n))


@dataclass
class CafGrid:
    """Delay-Doppler lattice with fit weights ``w`` and desired modulus ``d``.

    ``J`` holds one matrix per lattice point (flattened row-major over
    ``(tau, f)``); ``abs_chi`` is filled by :func:`caf_synthesize`.
    """

    basis: PulseBasis
    tau: np.ndarray
    f: np.ndarray
    w: np.ndarray
    d: np.ndarray
    J: np.ndarray = field(repr=False)
    abs_chi: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.tau.shape[0], self.f.shape[0]

    @property
    def origin(self) -> tuple[int, int] | None:
        it = np.flatnonzero(np.isclose(self.tau, 0.0, atol=1e-12 * self.basis.t_p))
        jf = np.flatnonzero(np.isclose(self.f, 0.0, atol=1e-12 / self.basis.duration))
        if it.size and jf.size:
            return int(it[0]), int(jf[0])
        return None

    def chi(self, x, y) -> np.ndarray:
        """``chi`` at every lattice point, shape ``(len(tau), len(f))``."""
        x = _as_code(x, self.basis.n)
        y = np.asarray(y, dtype=complex)
        return np.einsum("l,plk,k->p", y.conj(), self.J, x).reshape(self.shape)


def thumbtack_grid(basis: PulseBasis, tau_points: int = 41, f_points: int = 41,
                   tau_span: float = 10.0, f_span: float = 2.0) -> CafGrid:
    """Thumbtack target over ``[-tau_span t_p, tau_span t_p] x [-f_span/T, f_span/T]``.

    ``d = n`` at the origin and 0 elsewhere.  The mainlobe box
    ``[-t_p, t_p] x [-1/T, 1/T]`` gets zero weight except on the ``tau = 0``
    row and the ``f = 0`` column, which keep weight 1 together with the origin.
    """
    if tau_points < 1 or f_points < 1:
        raise ValueError("grid sizes must be positive")
    t_p, T = basis.t_p, basis.duration
    tau = np.linspace(-tau_span * t_p, tau_span * t_p, tau_points)
    f = np.linspace(-f_span / T, f_span / T, f_points)
    TT, FF = np.meshgrid(tau, f, indexing="ij")
    tol_t, tol_f = 1e-9 * t_p, 1e-9 / T
    on_tau_axis = np.abs(TT) <= tol_t
    on_f_axis = np.abs(FF) <= tol_f
    in_box = (np.abs(TT) <= t_p + tol_t) & (np.abs(FF) <= 1.0 / T + tol_f)
    mainlobe = in_box & ~on_tau_axis & ~on_f_axis
    w = np.where(mainlobe, 0.0, 1.0)
    d = np.where(on_tau_axis & on_f_axis, float(basis.n), 0.0)
    J = np.stack([j_matrix(t, fr, basis) for t, fr in zip(TT.ravel(), FF.ravel())])
    return CafGrid(basis=basis, tau=tau, f=f, w=w, d=d, J=J)


@dataclass
class CafState:
    """Cyclic-minimization variables; ``x`` is stored as phases so it stays unimodular."""

    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    g: float

    def copy(self) -> "CafState":
        return CafState(self.x.copy(), self.y.copy(), self.phi.copy(), self.g)


def criterion(grid: CafGrid, x, y, phi) -> float:
    """``g = sum w |d e^{j phi} - chi|^2`` over the lattice."""
    chi = grid.chi(x, y).ravel()
    r = grid.d.ravel() * np.exp(1j * np.asarray(phi).ravel()) - chi
    return float(np.sum(grid.w.ravel() * np.abs(r) ** 2))


def _active(grid: CafGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    wv = grid.w.ravel()
    idx = np.flatnonzero(wv > 0)
    return idx, wv[idx], grid.d.ravel()[idx], grid.J[idx]


def initial_state(grid: CafGrid, x, y=None) -> CafState:
    z = _as_code(x, grid.basis.n)
    y = z.copy() if y is None else np.asarray(y, dtype=complex).reshape(-1)
    phi = np.angle(grid.chi(z, y)).ravel()
    return CafState(x=phases_of(z), y=y, phi=phi, g=criterion(grid, z, y, phi))


def _update_x(M: np.ndarray, x: np.ndarray, solver: str, local_cfg: LocalConfig,
              merit_cfg: MeritConfig | None) -> np.ndarray:
    n = x.shape[0]
    start = np.concatenate([x, [0.0]])
    if solver == "local":
        phases, _ = local_optimize(M, start, local_cfg, validate=False)
    else:
        phases = merit_zero(M, merit_cfg, s0=start).s
    z = unimodular(phases)
    return phases_of(z[:n] * z[n].conj())


def caf_cycle(state: CafState, grid: CafGrid, solver: str = "local", *,
              local_cfg: LocalConfig | None = None, merit_cfg: MeritConfig | None = None) -> CafState:
    """One ``phi -> y -> x`` sweep.  Each block update is kept only if ``g`` does not rise.

    The ``y`` step solves ``(D1 + eps I) y = b`` with ``D1 = sum w (Jx)(Jx)^H``,
    ``b = sum w d e^{-j phi} Jx`` and ``eps = 1e-8 tr(D1)/n``.  The ``x`` step
    maximizes the UQP of ``-[[D2, -b2], [-b2^H, 0]]`` with
    ``D2 = sum w (J^H y)(J^H y)^H`` and ``b2 = sum w d e^{j phi} J^H y``,
    then reads ``x`` relative to the border phase.
    """
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")
    local_cfg = local_cfg or LocalConfig(max_iterations=2000)
    n = grid.basis.n
    idx, w, d, J = _active(grid)
    st = state.copy()

    # phi: exact block minimizer
    x = unimodular(st.x)
    chi = np.einsum("l,plk,k->p", st.y.conj(), grid.J, x)
    st.phi = np.angle(chi)
    st.g = criterion(grid, x, st.y, st.phi)

    # y: regularized weighted least squares
    A = J @ x
    D1 = (A.T * w) @ A.conj()
    D1 = 0.5 * (D1 + D1.conj().T)
    b = A.T @ (w * d * np.exp(-1j * st.phi[idx]))
    eps = 1e-8 * float(np.real(np.trace(D1))) / n
    try:
        y_new = np.linalg.solve(D1 + eps * np.eye(n), b)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("regularized D1 is singular; the grid has too few weighted points") from exc
    g_new = criterion(grid, x, y_new, st.phi)
    if g_new <= st.g:
        st.y, st.g = y_new, g_new

    # x: bordered UQP
    Ay = np.einsum("plk,l->pk", J.conj(), st.y)
    D2 = (Ay.T * w) @ Ay.conj()
    b2 = Ay.T @ (w * d * np.exp(1j * st.phi[idx]))
    G = np.zeros((n + 1, n + 1), dtype=complex)
    G[:n, :n] = D2
    G[:n, n] = -b2
    G[n, :n] = -b2.conj()
    G = 0.5 * (G + G.conj().T)
    x_new = _update_x(-G, st.x, solver, local_cfg, merit_cfg)
    g_new = criterion(grid, x_new, st.y, st.phi)
    if g_new <= st.g:
        st.x, st.g = x_new, g_new
    return st


def sidelobe_level(grid: CafGrid, x, y) -> float:
    """Mean of ``|chi|^2 / |chi(0,0)|^2`` over the weighted lattice points other than the origin."""
    o = grid.origin
    if o is None:
        raise ValueError("grid does not contain the origin")
    chi = grid.chi(x, y)
    peak = np.abs(chi[o]) ** 2
    mask = grid.w > 0
    mask[o] = False
    return float(np.mean(np.abs(chi[mask]) ** 2) / peak)


@dataclass
class CafResult:
    x: np.ndarray
    y: np.ndarray
    g_trace: list
    grid: CafGrid
    sidelobe_initial: float
    sidelobe_final: float


def caf_synthesize(n: int = 53, tau_points: int = 41, f_points: int = 41, iterations: int = 50,
                   solver: str = "local", *, x0=None, local_cfg: LocalConfig | None = None,
                   merit_cfg: MeritConfig | None = None, grid: CafGrid | None = None) -> CafResult:
    """Thumbtack synthesis from a Bjorck code (or ``x0``); ``y`` starts equal to ``x``.

    ``grid.abs_chi`` of the result holds ``|chi|`` of the final pair,
    normalized to peak 1.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if grid is None:
        grid = thumbtack_grid(PulseBasis(n), tau_points, f_points)
    x0 = bjorck(n) if x0 is None else x0
    state = initial_state(grid, x0)
    level0 = sidelobe_level(grid, state.x, state.y)
    trace = [state.g]
    for _ in range(iterations):
        state = caf_cycle(state, grid, solver, local_cfg=local_cfg, merit_cfg=merit_cfg)
        trace.append(state.g)
    chi = np.abs(grid.chi(state.x, state.y))
    peak = chi.max()
    grid.abs_chi = chi / peak if peak > 0 else chi
    return CafResult(
        x=state.x,
        y=state.y,
        g_trace=trace,
        grid=grid,
        sidelobe_initial=level0,
        sidelobe_final=sidelobe_level(grid, state.x, state.y),
    )


def write_outputs(result: CafResult, prefix, **meta) -> tuple[Path, Path]:
    """``<prefix>.csv`` (tau, f, abs_chi) and ``<prefix>.json`` (x phases, y, g trace, levels)."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path = prefix.with_name(prefix.name + ".json")
    grid = result.grid
    with csv_path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["tau", "f", "abs_chi"])
        for i, t in enumerate(grid.tau):
            for j, fr in enumerate(grid.f):
                out.writerow([repr(float(t)), repr(float(fr)), repr(float(grid.abs_chi[i, j]))])
    doc = {
        "n": grid.basis.n,
        "x_phases": [float(p) for p in result.x],
        "y": [[float(v.real), float(v.imag)] for v in result.y],
        "g_trace": [float(g) for g in result.g_trace],
        "sidelobe_initial": result.sidelobe_initial,
        "sidelobe_final": result.sidelobe_final,
        "sidelobe_reduction_db": 10.0 * np.log10(result.sidelobe_initial / result.sidelobe_final),
    }
    doc.update(meta)
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    return csv_path, json_path
