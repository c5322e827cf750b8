"""First-order primal-dual (Chambolle-Pock) programs with adaptive step balancing."""
import logging
from typing import Callable, Optional, Union

import numpy as np

from mcfli.core.hermitian import HermitianMatrix
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError
from mcfli.schemas.solver import SolverConfig
from mcfli.sensing.operators import LinearOperator
from mcfli.sensing.srop import SropOperator
from mcfli.solvers.projections import (
    project_l1_ball,
    project_l2_inf_ball,
    project_nonnegative,
    project_psd,
    soft_threshold,
)
from mcfli.solvers.result import RecoveryResult, best_so_far, resolve_config
from mcfli.solvers.tv import divergence, gradient, total_variation

logger = logging.getLogger(__name__)

# sigma * tau * ||K||^2 stays at this value
STEP_PRODUCT = 0.95
NORM_MARGIN = 1.02
# residual balancing
BALANCE_ALPHA = 0.5
BALANCE_ETA = 0.95
BALANCE_DELTA = 1.5
FEASIBILITY_RTOL = 1e-6
FEASIBILITY_ATOL = 1e-9


def _relative_change(new, old) -> float:
    return float(np.linalg.norm(new - old) / max(np.linalg.norm(new), np.finfo(float).tiny))


def _primal_dual(
    forward: Callable,
    adjoint: Callable,
    prox_primal: Callable,
    prox_dual_conjugate: Callable,
    x0,
    u0,
    operator_norm: float,
    config: SolverConfig,
    objective: Callable,
    residual: Callable,
    feasible: Callable,
    name: str,
):
    if config.step_rule == "fixed":
        tau = config.step_size
        sigma = STEP_PRODUCT / (tau * max(operator_norm, np.finfo(float).tiny) ** 2)
    else:
        tau = sigma = np.sqrt(STEP_PRODUCT) / max(operator_norm, np.finfo(float).tiny)
    alpha = BALANCE_ALPHA

    x, u = x0, u0
    Kx = forward(x)
    KTu = adjoint(u)
    objective_trace = [objective(x, Kx)]
    residual_trace = [residual(Kx)]
    admissible = [feasible(Kx)]
    converged = False
    iteration = 0

    for iteration in range(1, config.max_iterations + 1):
        x_new = prox_primal(x - tau * KTu, tau)
        Kx_new = forward(x_new)
        u_new = prox_dual_conjugate(u + sigma * (2 * Kx_new - Kx), sigma)
        KTu_new = adjoint(u_new)

        primal_res = np.linalg.norm((x - x_new) / tau - (KTu - KTu_new))
        dual_res = np.linalg.norm((u - u_new) / sigma - (Kx - Kx_new))
        if primal_res > BALANCE_DELTA * dual_res:
            tau, sigma, alpha = tau / (1 - alpha), sigma * (1 - alpha), alpha * BALANCE_ETA
        elif dual_res > BALANCE_DELTA * primal_res:
            tau, sigma, alpha = tau * (1 - alpha), sigma / (1 - alpha), alpha * BALANCE_ETA

        primal_change = _relative_change(x_new, x)
        dual_change = _relative_change(u_new, u)
        x, u, Kx, KTu = x_new, u_new, Kx_new, KTu_new
        objective_trace.append(objective(x, Kx))
        residual_trace.append(residual(Kx))
        admissible.append(feasible(Kx))

        if iteration % 500 == 0:
            logger.debug("%s it=%d obj=%.6e res=%.3e change=%.3e/%.3e", name, iteration,
                         objective_trace[-1], residual_trace[-1], primal_change, dual_change)
        if primal_change < config.rtol and dual_change < config.rtol and admissible[-1]:
            converged = True
            break

    if not converged:
        logger.warning("%s stopped without converging after %d iterations", name, iteration)
    # best feasible objective so far, past the first feasible iterate after the window
    trace, window = best_so_far(objective_trace, config.memory, admissible)
    return x, iteration, converged, trace, np.asarray(residual_trace), window


def _ball_feasibility(y: np.ndarray, epsilon: float) -> Callable:
    slack = epsilon * (1 + FEASIBILITY_RTOL) + FEASIBILITY_ATOL * max(1.0, float(np.abs(y).sum()))
    return lambda Kx: float(np.abs(y - Kx).sum()) <= slack


def _ball_dual_prox(y: np.ndarray, epsilon: float) -> Callable:
    # Moreau: prox of sigma F* with F the indicator of {w : ||w - y||_1 <= eps}
    def prox(v, sigma):
        return v - sigma * (y + project_l1_ball(v / sigma - y, epsilon))
    return prox


def solve_bpdn_l1(
    operator: LinearOperator,
    y_c,
    epsilon: Optional[float] = None,
    config: Optional[SolverConfig] = None,
) -> RecoveryResult:
    """
    Minimize ||x||_1 subject to ||y_c - B x||_1 <= epsilon.

    Args:
        operator (LinearOperator): sensing operator B
        y_c: measurements
        epsilon (float): l1 fidelity budget, overrides ``config.epsilon``
        config (SolverConfig): iteration cap, tolerances and step rule

    Returns:
        RecoveryResult: estimate with ``residual`` = ||y_c - B x||_1
    """
    cfg, epsilon = resolve_config(config, "epsilon", epsilon=epsilon)
    y = np.asarray(y_c, dtype=float).ravel()
    if y.shape != operator.output_shape:
        raise DimensionError(f"expected {operator.output_shape} measurements, got {y.shape}")

    x0 = np.zeros(operator.input_shape)
    if float(np.abs(y).sum()) <= epsilon:
        return RecoveryResult(x0, 0, float(np.abs(y).sum()), True, "bpdn_l1",
                              np.array([0.0]), np.array([float(np.abs(y).sum())]))

    norm = NORM_MARGIN * operator.norm(cfg.power_iterations, cfg.seed)
    x, iterations, converged, objective_trace, residual_trace, window = _primal_dual(
        operator.forward,
        operator.adjoint,
        soft_threshold,
        _ball_dual_prox(y, epsilon),
        x0,
        np.zeros_like(y),
        norm,
        cfg,
        objective=lambda x, Kx: float(np.abs(x).sum()),
        residual=lambda Kx: float(np.abs(y - Kx).sum()),
        feasible=_ball_feasibility(y, epsilon),
        name="bpdn_l1",
    )
    residual = float(np.abs(y - operator.forward(x)).sum())
    return RecoveryResult(x, iterations, residual, converged, "bpdn_l1", objective_trace, residual_trace, window)


def solve_trace_min_psd(
    operator: Union[SropOperator, SketchBatch],
    y,
    epsilon: Optional[float] = None,
    config: Optional[SolverConfig] = None,
) -> RecoveryResult:
    """
    Minimize tr(X) subject to ||y - A(X)||_1 <= epsilon and X PSD.

    ``operator`` is the uncentered SROP operator (or the sketches defining it).
    The estimate is returned as a HermitianMatrix; ``residual`` is ||y - A(X)||_1.
    """
    if isinstance(operator, SketchBatch):
        operator = SropOperator(operator)
    if operator.centered:
        raise DimensionError("trace minimization needs the uncentered SROP operator")
    cfg, epsilon = resolve_config(config, "epsilon", epsilon=epsilon)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != operator.output_shape:
        raise DimensionError(f"expected {operator.output_shape} measurements, got {y.shape}")

    Q = operator.input_shape[0]
    identity = np.eye(Q)
    X0 = np.zeros((Q, Q), dtype=complex)
    if float(np.abs(y).sum()) <= epsilon:
        return RecoveryResult(HermitianMatrix(X0), 0, float(np.abs(y).sum()), True, "trace_min_psd",
                              np.array([0.0]), np.array([float(np.abs(y).sum())]))

    norm = NORM_MARGIN * operator.norm(cfg.power_iterations, cfg.seed)
    X, iterations, converged, objective_trace, residual_trace, window = _primal_dual(
        operator.forward,
        operator.adjoint,
        lambda V, t: project_psd(V - t * identity),
        _ball_dual_prox(y, epsilon),
        X0,
        np.zeros_like(y),
        norm,
        cfg,
        objective=lambda X, Kx: float(np.trace(X).real),
        residual=lambda Kx: float(np.abs(y - Kx).sum()),
        feasible=_ball_feasibility(y, epsilon),
        name="trace_min_psd",
    )
    estimate = HermitianMatrix(X)
    residual = float(np.abs(y - operator.forward(estimate.data)).sum())
    return RecoveryResult(estimate, iterations, residual, converged, "trace_min_psd",
                          objective_trace, residual_trace, window)


def solve_tv_nonneg(
    operator: LinearOperator,
    y_c,
    rho: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    shape: Optional[tuple] = None,
) -> RecoveryResult:
    """
    Minimize 1/(2M) ||y_c - B f||^2 + rho TV(f) subject to f >= 0.

    The gradient block is scaled to the norm of B so both blocks share one step
    size; ``shape`` defaults to the operator's grid. ``residual`` is the final
    objective value.
    """
    cfg, rho = resolve_config(config, "rho", rho=rho)
    y = np.asarray(y_c, dtype=float).ravel()
    if y.shape != operator.output_shape:
        raise DimensionError(f"expected {operator.output_shape} measurements, got {y.shape}")
    if shape is None:
        grid = getattr(operator, "grid", None)
        if grid is None:
            raise DimensionError("solve_tv_nonneg needs the image shape")
        shape = grid.shape
    shape = tuple(shape)
    M = y.size
    N = int(np.prod(shape))
    ndim = len(shape)

    b_norm = operator.norm(cfg.power_iterations, cfg.seed)
    if b_norm == 0:
        raise DimensionError("operator is identically zero")
    # ||grad||^2 <= 4 ndim for forward differences
    c = b_norm / np.sqrt(4.0 * ndim)
    radius = rho / c

    def forward(f):
        return np.concatenate([operator.forward(f), c * gradient(f.reshape(shape)).ravel()])

    def adjoint(u):
        return operator.adjoint(u[:M]) - c * divergence(u[M:].reshape((ndim,) + shape)).ravel()

    def prox_dual(v, sigma):
        data = (v[:M] - sigma * y) / (1.0 + sigma * M)
        tv = project_l2_inf_ball(v[M:].reshape((ndim,) + shape), radius).ravel()
        return np.concatenate([data, tv])

    def objective(f, Kf):
        r = y - Kf[:M]
        return float(r @ r) / (2 * M) + rho * total_variation(f.reshape(shape))

    f, iterations, converged, objective_trace, residual_trace, window = _primal_dual(
        forward,
        adjoint,
        lambda v, t: project_nonnegative(v),
        prox_dual,
        np.zeros(N),
        np.zeros(M + ndim * N),
        NORM_MARGIN * np.sqrt(2.0) * b_norm,
        cfg,
        objective=objective,
        residual=lambda Kf: float(np.linalg.norm(y - Kf[:M])),
        feasible=lambda Kf: True,
        name="tv_nonneg",
    )
    final = objective(f, forward(f))
    return RecoveryResult(f, iterations, final, converged, "tv_nonneg", objective_trace, residual_trace, window)
