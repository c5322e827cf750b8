"""Lasso by spectral projected gradient onto the l1 ball."""
from collections import deque
import logging
from typing import Optional

import numpy as np

from mcfli.exceptions import DimensionError
from mcfli.schemas.solver import SolverConfig
from mcfli.sensing.operators import LinearOperator
from mcfli.solvers.projections import project_l1_ball
from mcfli.solvers.result import RecoveryResult, best_so_far, resolve_config

logger = logging.getLogger(__name__)

ARMIJO_GAMMA = 1e-4
MIN_LINE_STEP = 1e-12


def _duality_gap(r: np.ndarray, b: np.ndarray, g: np.ndarray, tau: float) -> float:
    """Gap of min 1/2||b - Bx||^2 s.t. ||x||_1 <= tau, with r = b - Bx and g = -B^T r."""
    return float(r @ r - b @ r + tau * np.abs(g).max())


def solve_lasso(
    operator: LinearOperator,
    y_c,
    tau: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    x0=None,
) -> RecoveryResult:
    """
    Minimize 1/2 ||y_c - B x||^2 subject to ||x||_1 <= tau.

    Args:
        operator (LinearOperator): sensing operator B with forward and adjoint
        y_c: measurement vector
        tau (float): l1 radius, overrides ``config.tau``
        config (SolverConfig): iteration cap, tolerances, step rule, memory of the
            nonmonotone line search
        x0: optional starting point, projected onto the ball

    Returns:
        RecoveryResult: estimate, final residual ||y_c - B x||_2 and traces

    Raises:
        ConfigError: if tau is missing or another program parameter is also set
        DimensionError: if y_c does not match the operator
    """
    cfg, tau = resolve_config(config, "tau", tau=tau)
    b = np.asarray(y_c, dtype=float).ravel()
    if b.shape != operator.output_shape:
        raise DimensionError(f"expected {operator.output_shape} measurements, got {b.shape}")

    x = np.zeros(operator.input_shape) if x0 is None else project_l1_ball(np.ravel(x0), tau)
    if tau == 0 or not np.any(b):
        x = np.zeros(operator.input_shape)
        residual = float(np.linalg.norm(b))
        return RecoveryResult(x, 0, residual, True, "lasso",
                              np.array([0.5 * residual ** 2]), np.array([residual]))

    if cfg.step_rule == "fixed":
        lipschitz = 1.0 / cfg.step_size
    else:
        lipschitz = max(operator.norm(cfg.power_iterations, cfg.seed) ** 2, np.finfo(float).tiny)
    step_min, step_max = 1e-10 / lipschitz, 1e10 / lipschitz
    step = 1.0 / lipschitz

    r = b - operator.forward(x)
    f = 0.5 * float(r @ r)
    g = -operator.adjoint(r)
    history = deque([f], maxlen=cfg.memory)
    objective_trace = [f]
    residual_trace = [float(np.sqrt(2 * f))]
    x_best, f_best = x, f
    converged = False
    iteration = 0

    for iteration in range(1, cfg.max_iterations + 1):
        d = project_l1_ball(x - step * g, tau) - x
        gtd = float(g @ d)
        if gtd >= 0 or not np.any(d):
            converged = True
            break

        # nonmonotone Armijo search along the projected direction
        Bd = operator.forward(d)
        f_ref = max(history)
        lam = 1.0
        while True:
            r_new = r - lam * Bd
            f_new = 0.5 * float(r_new @ r_new)
            if f_new <= f_ref + ARMIJO_GAMMA * lam * gtd:
                break
            if lam < MIN_LINE_STEP:
                r_new = None
                break
            curvature = f_new - f - lam * gtd
            trial = -0.5 * gtd * lam * lam / curvature if curvature > 0 else 0.5 * lam
            lam = min(max(trial, 0.1 * lam), 0.5 * lam)
        if r_new is None:
            logger.warning("lasso line search stalled at iteration %d", iteration)
            break

        s = lam * d
        x_new = x + s
        g_new = -operator.adjoint(r_new)
        sty = float(s @ (g_new - g))
        sts = float(s @ s)
        step = min(max(sts / sty, step_min), step_max) if sty > 0 else step_max

        change = np.sqrt(sts) / max(np.linalg.norm(x_new), np.finfo(float).tiny)
        x, r, f, g = x_new, r_new, f_new, g_new
        history.append(f)
        if f < f_best:
            x_best, f_best = x, f
        objective_trace.append(f)
        residual_trace.append(float(np.sqrt(2 * f)))

        gap = _duality_gap(r, b, g, tau)
        if iteration % 500 == 0:
            logger.debug("lasso it=%d f=%.6e gap=%.3e change=%.3e", iteration, f, gap, change)
        if change < cfg.rtol or gap <= max(cfg.atol, cfg.rtol * f):
            converged = True
            break

    if not converged:
        logger.warning("lasso stopped without converging after %d iterations", iteration)
    # the nonmonotone search may end above the best iterate seen
    x = x_best
    residual = float(np.linalg.norm(b - operator.forward(x)))
    trace, window = best_so_far(objective_trace, cfg.memory)
    return RecoveryResult(x, iteration, residual, converged, "lasso",
                          trace, np.asarray(residual_trace), window)
