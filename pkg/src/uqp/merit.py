"""MERIT: alternating projections that certify UQP solutions.

For a candidate ``s`` the matrix ``R + alpha0 ss^H`` is approximated by
``(Q1 + P1) o ss^H`` where ``Q1`` has dominant eigenvector ``1`` and ``P1`` is
real with non-negative off-diagonal entries.  Both pieces are maximized by
``s``, so once the residual ``E`` vanishes ``s`` is certified: globally
optimal when ``alpha0 == 0``, and within a factor
``gamma = v / (v + alpha0 n^2)`` of the optimum otherwise.

``merit_zero`` runs the ``alpha0 = 0`` alternation; when it stalls,
``merit_positive`` raises ``alpha0`` in steps of ``delta`` and bisects down to
the smallest value for which the residual still reaches ``eps0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cone import project_P1, project_Q1
from .linalg import as_hermitian, as_phases, phases_of, unimodular
from .local import LocalConfig, local_optimize

__all__ = [
    "MeritConfig",
    "MeritReport",
    "MeritState",
    "merit",
    "merit_positive",
    "merit_zero",
    "report_to_json",
    "s_update",
    "safeguard_load",
    "suboptimality_bounds",
]


@dataclass(frozen=True)
class MeritConfig:
    """Knobs for :func:`merit`.

    ``delta``/``delta0`` default to ``0.1 ||R||_F / n^2`` and ``delta / 2**10``.
    ``max_outer`` caps the total number of projection cycles of one solve
    (both phases); ``max_cycles`` caps a single alternation at fixed
    ``alpha0``.  An alternation that improves its residual by less than
    ``stall_tol`` (relative) over ``stall_window`` cycles is declared stuck.
    Once the residual is below ``stall_projection * (1 + ||R_work||_F)`` it
    is also declared stuck when its geometric rate over the last window would
    not reach ``eps0`` within the remaining cycle budget (``None`` disables
    this rule).
    """

    eps0: float = 1e-9
    delta: float | None = None
    delta0: float | None = None
    max_outer: int = 20000
    max_cycles: int = 3000
    stall_window: int = 25
    stall_tol: float = 1e-12
    stall_projection: float | None = 1e-6
    local_cfg: LocalConfig = field(default_factory=lambda: LocalConfig(max_iterations=500))
    seed: int = 0
    restarts: int = 1
    q_mode: str = "exact"
    polish_start: bool = True

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if self.delta is not None:
            if not self.delta > 0:
                raise ValueError("delta must be positive")
            if self.delta0 is not None and not self.delta > self.delta0 > 0:
                raise ValueError("need delta > delta0 > 0")
        elif self.delta0 is not None and not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class MeritState:
    """Variables of one alternation, in the frame of the loaded matrix ``R_work``."""

    s: np.ndarray
    Q1: np.ndarray
    P1: np.ndarray
    alpha0: float
    residual: float
    R_work: np.ndarray
    loading: float
    converged: bool = False

    def copy(self) -> "MeritState":
        return replace(self, s=self.s.copy(), Q1=self.Q1.copy(), P1=self.P1.copy())


@dataclass
class MeritReport:
    """Outcome of a MERIT solve.

    ``residual_trace`` lists ``||E||_F`` after every projection cycle; its
    first ``zero_length`` entries come from the ``alpha0 = 0`` phase and the
    rest from the ``alpha0`` search, whose increments are in ``alpha_steps``.
    """

    s: np.ndarray
    objective: float
    gamma: float
    alpha0: float
    lower_bound: float
    upper_bound: float
    residual_trace: list
    outer_iterations: int
    converged: bool
    residual_final: float
    loading: float = 0.0
    alpha_steps: list = field(default_factory=list)
    zero_length: int = 0
    state: MeritState | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.s.shape[0])


# -- building blocks ------------------------------------------------------------


def _residual(R_work: np.ndarray, z: np.ndarray, R1: np.ndarray, alpha0: float) -> float:
    target = R_work * np.outer(z.conj(), z) + alpha0
    return float(np.linalg.norm(target - R1))


def safeguard_load(R, R1, s, margin: float | None = None) -> tuple[np.ndarray, float]:
    """Load ``R`` so that every ``R1`` within the current residual stays positive definite.

    ``eps0 = ||R o conj(ss^H) - R1||_F`` and
    ``lambda = max(0, eps0 - sigma_n(R)) + margin``.  Since the alternation
    never increases the residual, all later iterates satisfy the same bound.
    """
    R = as_hermitian(R)
    R1 = np.asarray(R1, dtype=complex)
    n = R.shape[0]
    z = unimodular(as_phases(s, n))
    eps = float(np.linalg.norm(R * np.outer(z.conj(), z) - R1))
    sigma_n = float(np.linalg.eigvalsh(R)[0])
    if margin is None:
        margin = 1e-6 * (1.0 + np.linalg.norm(R))
    lam = max(0.0, eps - sigma_n) + margin
    return R + lam * np.eye(n), lam


def s_update(R, R1, s, cfg: LocalConfig | None = None, *, deload: bool = True) -> np.ndarray:
    """Phase iteration on ``M = R o R1^T`` started at ``s``.

    ``s^H M s = tr(R Diag(s) R1 Diag(s^*))``, so raising it lowers
    ``||R - R1 o ss^H||_F``.  With ``deload`` the iteration runs on
    ``M - c I`` with ``c`` just below ``sigma_n(M)``: same maximizer and still
    positive definite, but without the diagonal dead weight that the
    safeguard loading puts on ``M``.
    """
    R = np.asarray(R, dtype=complex)
    R1 = np.asarray(R1, dtype=complex)
    M = R * R1.T
    M = 0.5 * (M + M.conj().T)
    if deload:
        n = M.shape[0]
        sig = float(np.linalg.eigvalsh(M)[0])
        floor = 1e-3 * np.linalg.norm(M) / n
        if sig > floor:
            M = M - (sig - floor) * np.eye(n)
    phases, _ = local_optimize(M, s, cfg, validate=False, record=False)
    return phases


def suboptimality_bounds(R, Rs, s) -> tuple[float, float]:
    """Bounds on ``max s'^H R s'`` from ``E = R - Rs`` when ``s`` maximizes ``Rs``.

    ``lower = s^H Rs s + n sigma_n(E)``, ``upper = s^H Rs s + n sigma_1(E)``.
    """
    R = np.asarray(R, dtype=complex)
    Rs = np.asarray(Rs, dtype=complex)
    n = R.shape[0]
    z = unimodular(as_phases(s, n))
    E = R - Rs
    w = np.linalg.eigvalsh(0.5 * (E + E.conj().T))
    base = float(np.real(np.vdot(z, Rs @ z)))
    return base + n * float(w[0]), base + n * float(w[-1])


def _alternate(state: MeritState, cfg: MeritConfig, trace: list, budget: int) -> int:
    """Cycle Q1, P1 and s-updates at fixed ``alpha0``; returns cycles used.

    Sets ``state.converged`` when the residual reaches ``cfg.eps0``.
    """
    R_work, alpha0 = state.R_work, state.alpha0
    n = R_work.shape[0]
    ones = np.ones((n, n))
    eye = np.eye(n)
    z = unimodular(state.s)
    Q, P = state.Q1, state.P1
    history = [state.residual]
    scale = 1.0 + float(np.linalg.norm(R_work))
    used = 0
    state.converged = state.residual <= cfg.eps0
    while not state.converged and used < min(budget, cfg.max_cycles):
        target = R_work * np.outer(z.conj(), z) + alpha0
        Q = project_Q1(target - P, cfg.q_mode)
        P = project_P1(target - Q)
        R1 = Q + P
        if alpha0 > 0:
            shifted = R1 - alpha0 * ones
            sig = float(np.linalg.eigvalsh(shifted)[0])
            lam = max(0.0, -sig) + 1e-6 * (1.0 + np.linalg.norm(shifted))
            phases = s_update(R_work + lam * eye, shifted + lam * eye, phases_of(z), cfg.local_cfg)
        else:
            phases = s_update(R_work, R1, phases_of(z), cfg.local_cfg)
        z = unimodular(phases)
        res = _residual(R_work, z, R1, alpha0)
        used += 1
        trace.append(res)
        history.append(res)
        state.converged = res <= cfg.eps0
        w = cfg.stall_window
        if len(history) > w and not state.converged:
            ref = history[-1 - w]
            if ref - res <= cfg.stall_tol * ref:
                break
            if cfg.stall_projection and 0 < res <= cfg.stall_projection * scale:
                # cycles still needed at the recent geometric rate
                needed = w * math.log(cfg.eps0 / res) / math.log(res / ref)
                if used + needed > min(budget, cfg.max_cycles):
                    break
    state.s, state.Q1, state.P1 = phases_of(z), Q, P
    state.residual = history[-1]
    return used


def _make_report(R: np.ndarray, state: MeritState, trace: list, cycles: int, alpha_steps=(),
                 zero_length: int | None = None) -> MeritReport:
    n = R.shape[0]
    z = unimodular(state.s)
    obj = float(np.real(np.vdot(z, R @ z)))
    zz = np.outer(z, z.conj())
    Rs = (state.Q1 + state.P1) * zz
    R_prime = state.R_work + state.alpha0 * zz
    lo, up = suboptimality_bounds(R_prime, Rs, state.s)
    shift = state.loading * n
    upper = up - shift
    lower = lo - state.alpha0 * n * n - shift
    if state.converged:
        gamma = 1.0 if state.alpha0 == 0 else obj / (obj + state.alpha0 * n * n)
    else:
        # E is not negligible, so only the eigenvalue bound certifies anything
        gamma = obj / upper if upper > 0 else float("nan")
        if gamma >= 1.0:
            gamma = math.nextafter(1.0, 0.0)
    return MeritReport(
        s=state.s.copy(),
        objective=obj,
        gamma=float(gamma),
        alpha0=float(state.alpha0),
        lower_bound=float(lower),
        upper_bound=float(upper),
        residual_trace=list(trace),
        outer_iterations=cycles,
        converged=bool(state.converged),
        residual_final=float(state.residual),
        loading=float(state.loading),
        alpha_steps=list(alpha_steps),
        zero_length=len(trace) if zero_length is None else zero_length,
        state=state,
    )


# -- the two phases -----------------------------------------------------------------


def merit_zero(R, cfg: MeritConfig | None = None, s0=None) -> MeritReport:
    """Alternation with ``alpha0 = 0`` from ``Q1 = P1 = I`` and a random (or given) start.

    With ``cfg.polish_start`` the start is first moved to the fixed point of
    the phase iteration on ``R`` reached from it.
    """
    cfg = cfg or MeritConfig()
    R = as_hermitian(R)
    n = R.shape[0]
    if s0 is None:
        s0 = np.random.default_rng(cfg.seed).uniform(0.0, 2.0 * np.pi, n)
    s = as_phases(s0, n)
    if cfg.polish_start:
        # heavy safeguard loading creates spurious fixed points of the s-update;
        # starting from a hyper point of R keeps clear of them
        s, _ = local_optimize(R, s, cfg.local_cfg, validate=False, record=False)
    eye = np.eye(n, dtype=complex)
    R_work, lam = safeguard_load(R, 2.0 * eye, s)
    z = unimodular(s)
    state = MeritState(
        s=phases_of(z),
        Q1=eye.copy(),
        P1=eye.real.copy(),
        alpha0=0.0,
        residual=_residual(R_work, z, 2.0 * eye, 0.0),
        R_work=R_work,
        loading=lam,
    )
    trace = [state.residual]
    cycles = _alternate(state, cfg, trace, cfg.max_outer)
    return _make_report(R, state, trace, cycles)


def merit_positive(R, cfg: MeritConfig | None = None, warm: MeritState | MeritReport | None = None) -> MeritReport:
    """Raise ``alpha0`` until the residual reaches ``eps0``, then bisect it down.

    ``warm`` is the state (or report) left by :func:`merit_zero`.  Each
    success halves the step and restarts from the variables saved at the
    last unsuccessful ``alpha0``; the search ends on a success with
    ``delta < delta0``.  The report carries the smallest certified
    ``alpha0``.  ``alpha_steps`` records, per increment, the residual before
    the increment, the residual of the explicit candidate
    ``Q1 + delta 11^T`` and the residual after the first ``Q1`` projection.
    """
    cfg = cfg or MeritConfig()
    R = as_hermitian(R)
    n = R.shape[0]
    if warm is None:
        warm = merit_zero(R, cfg)
    if isinstance(warm, MeritReport):
        used0 = warm.outer_iterations
        trace = list(warm.residual_trace)
        warm = warm.state
    else:
        used0, trace = 0, [warm.residual]
    zero_length = len(trace)
    if warm.converged:
        return _make_report(R, warm.copy(), trace, used0)

    delta, delta0 = _step_sizes(R, cfg)
    ones = np.ones((n, n))

    saved = warm.copy()
    saved.alpha0 = 0.0
    current = saved.copy()
    alpha = 0.0
    best: MeritState | None = None
    used = used0
    steps = []
    while used < cfg.max_outer:
        alpha_new = alpha + delta
        trial = current.copy()
        z = unimodular(trial.s)
        res_pre = _residual(trial.R_work, z, trial.Q1 + trial.P1, trial.alpha0)
        res_cand = _residual(trial.R_work, z, trial.Q1 + (alpha_new - trial.alpha0) * ones + trial.P1, alpha_new)
        target = trial.R_work * np.outer(z.conj(), z) + alpha_new
        q_first = project_Q1(target - trial.P1, cfg.q_mode)
        res_q = float(np.linalg.norm(target - q_first - trial.P1))
        trial.alpha0 = alpha_new
        trial.residual = res_cand
        used += _alternate(trial, cfg, trace, cfg.max_outer - used)
        steps.append(
            {
                "alpha_pre": alpha,
                "alpha_new": alpha_new,
                "residual_pre": res_pre,
                "residual_candidate": res_cand,
                "residual_after_q": res_q,
                "residual_final": trial.residual,
                "success": trial.converged,
            }
        )
        if trial.converged:
            if best is None or trial.alpha0 < best.alpha0:
                best = trial.copy()
            if delta >= delta0:
                delta /= 2.0
                current = saved.copy()
                continue
            break
        alpha = alpha_new
        saved = trial.copy()
        current = trial
    final = best if best is not None else current
    return _make_report(R, final, trace, used, steps, zero_length)


def _step_sizes(R: np.ndarray, cfg: MeritConfig) -> tuple[float, float]:
    n = R.shape[0]
    delta = cfg.delta if cfg.delta is not None else 0.1 * np.linalg.norm(R) / n**2
    delta0 = cfg.delta0 if cfg.delta0 is not None else delta / 2**10
    return delta, delta0


def _positive_ceiling(R: np.ndarray, objective: float, cfg: MeritConfig) -> float:
    """Best gamma ``merit_positive`` could certify: every success has ``alpha0 >= delta0 / 2``."""
    n = R.shape[0]
    _, delta0 = _step_sizes(R, cfg)
    if objective <= 0:
        return 1.0
    return objective / (objective + 0.5 * delta0 * n * n)


def merit(R, cfg: MeritConfig | None = None) -> MeritReport:
    """Full solve: ``merit_zero`` then, if needed, ``merit_positive``; best of ``cfg.restarts``.

    A stalled ``merit_zero`` still certifies ``gamma = v / upper`` through the
    eigenvalue bound.  ``merit_positive`` is skipped when that already beats
    the best gamma it could reach, and otherwise the better of the two
    certificates is kept.
    """
    cfg = cfg or MeritConfig()
    R = as_hermitian(R)
    n = R.shape[0]
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.restarts):
        s0 = rng.uniform(0.0, 2.0 * np.pi, n)
        rep = merit_zero(R, cfg, s0)
        if not rep.converged and rep.gamma < _positive_ceiling(R, rep.objective, cfg):
            pos = merit_positive(R, cfg, rep)
            if pos.gamma >= rep.gamma:
                rep = pos
        if best is None or (rep.gamma, rep.objective) > (best.gamma, best.objective):
            best = rep
        if best.converged and best.gamma == 1.0:
            break
    return best


def report_to_json(rep: MeritReport | None, *, method: str, n: int, seed: int, objective=None,
                   s=None, elapsed_ms=None, **extra) -> dict:
    """Report document shared by all solve methods; non-MERIT methods pass ``rep=None``."""
    if rep is not None:
        doc = {
            "method": method,
            "n": n,
            "objective": rep.objective,
            "gamma": rep.gamma,
            "alpha0": rep.alpha0,
            "lower_bound": rep.lower_bound,
            "upper_bound": rep.upper_bound,
            "outer_iterations": rep.outer_iterations,
            "converged": rep.converged,
            "residual_final": rep.residual_final,
            "s_phases": [float(p) for p in rep.s],
        }
    else:
        doc = {
            "method": method,
            "n": n,
            "objective": float(objective),
            "gamma": None,
            "alpha0": None,
            "lower_bound": None,
            "upper_bound": None,
            "outer_iterations": extra.pop("outer_iterations", None),
            "converged": extra.pop("converged", True),
            "residual_final": None,
            "s_phases": [float(p) for p in s],
        }
    doc["seed"] = seed
    doc["elapsed_ms"] = elapsed_ms
    doc.update(extra)
    return doc
