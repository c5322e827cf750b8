from dataclasses import dataclass
import logging
from typing import Literal, Optional

import numpy as np

from mcfli.config import SUCCESS_DB
from mcfli.core.grid import Grid, make_grid
from mcfli.core.layout import random_layout_1d
from mcfli.core.rng import child_seed
from mcfli.core.scene import sparse_scene
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import ConfigError
from mcfli.schemas.solver import SolverConfig
from mcfli.sensing.combined import CombinedOperator
from mcfli.solvers.lasso import solve_lasso
from mcfli.solvers.metrics import snr
from mcfli.solvers.primal_dual import solve_bpdn_l1

logger = logging.getLogger(__name__)

# sub-stream indices of a trial seed
LAYOUT_STREAM, SKETCH_STREAM, SCENE_STREAM = 0, 1, 2


@dataclass(frozen=True)
class TrialResult:
    K: int
    Q: int
    M: int
    seed: int
    snr_db: float
    success: bool
    num_visibilities: int
    iterations: int


def default_grid() -> Grid:
    return make_grid(1, 256, 1.0)


def run_trial(
    K: int,
    Q: int,
    M: int,
    seed: int,
    solver: Literal["lasso", "bpdn"] = "lasso",
    grid: Optional[Grid] = None,
    config: Optional[SolverConfig] = None,
    threshold_db: float = SUCCESS_DB,
) -> TrialResult:
    """One phase-transition trial on a 1-D grid (N=256 by default).

    Random core layout, unit-phase sketches, K-sparse zero-mean Gaussian scene,
    debiased SROP data and recovery by the Lasso with tau = ||f||_1 (or BPDN
    with epsilon = 0).
    """
    grid = grid or default_grid()
    config = config or SolverConfig()
    layout = random_layout_1d(grid, Q, child_seed(seed, LAYOUT_STREAM))
    sketches = draw_sketches(Q, M, child_seed(seed, SKETCH_STREAM))
    scene = sparse_scene(grid, K, child_seed(seed, SCENE_STREAM))

    operator = CombinedOperator(layout, sketches)
    y_c = operator.forward(scene.vector)
    if solver == "lasso":
        result = solve_lasso(operator, y_c, tau=float(np.abs(scene.vector).sum()), config=config)
    elif solver == "bpdn":
        result = solve_bpdn_l1(operator, y_c, epsilon=0.0, config=config)
    else:
        raise ConfigError(f"unknown solver {solver!r}")

    snr_db = snr(result.estimate, scene.vector)
    trial = TrialResult(K, Q, M, seed, snr_db, snr_db >= threshold_db, layout.num_visibilities, result.iterations)
    logger.debug("trial K=%d Q=%d M=%d: %.1f dB, |V0|=%d", K, Q, M, snr_db, layout.num_visibilities)
    return trial
