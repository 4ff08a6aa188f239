"""Unimodular quadratic programming: local ascent, MERIT certificates, scenarios."""

from .caf import CafGrid, CafState, PulseBasis, caf_cycle, caf_synthesize, caf_value, j_matrix
from .cone import (
    ConeDecomposition,
    ConeSequence,
    cone_sequence,
    dominance_rho,
    project_P1,
    project_Q1,
    r_plus,
    rho_floor,
    transport,
)
from .linalg import (
    EigenSystem,
    as_hermitian,
    diagonal_load,
    frobenius_distance,
    hadamard,
    hermitian_eig,
    load_matrix,
    quadratic_form,
    save_matrix,
)
from .local import DegeneratePhaseError, LocalConfig, LocalTrace, is_hyper_point, local_optimize, power_step
from .merit import (
    MeritConfig,
    MeritReport,
    merit,
    merit_positive,
    merit_zero,
    s_update,
    safeguard_load,
    suboptimality_bounds,
)
from .oracle import OracleResult, brute_force, refine
from .scenarios import (
    ClutterParams,
    RandomSpec,
    bjorck,
    clutter_case,
    crlb_matrix,
    legendre,
    ml_embedding,
    random_hermitian,
    snr_matrix,
    steering,
    theorem2_construct,
)

__version__ = "0.1.0"
