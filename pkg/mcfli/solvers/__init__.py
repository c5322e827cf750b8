from mcfli.schemas.solver import SolverConfig
from mcfli.solvers.result import RecoveryResult, resolve_config
from mcfli.solvers.projections import (
    project_centered_l1_ball,
    project_l1_ball,
    project_l1_ball_bisection,
    project_nonnegative,
    project_psd,
    soft_threshold,
)
from mcfli.solvers.tv import divergence, gradient, total_variation
from mcfli.solvers.metrics import snr, vignetted_snr
from mcfli.solvers.lasso import solve_lasso
from mcfli.solvers.primal_dual import solve_bpdn_l1, solve_trace_min_psd, solve_tv_nonneg
from mcfli.solvers.nyquist import nyquist_count, nyquist_recover, nyquist_sketches

__all__ = [
    "SolverConfig", "RecoveryResult", "resolve_config",
    "soft_threshold", "project_l1_ball", "project_l1_ball_bisection", "project_centered_l1_ball",
    "project_psd", "project_nonnegative",
    "gradient", "divergence", "total_variation",
    "snr", "vignetted_snr",
    "solve_lasso", "solve_bpdn_l1", "solve_trace_min_psd", "solve_tv_nonneg",
    "nyquist_sketches", "nyquist_recover", "nyquist_count",
]
