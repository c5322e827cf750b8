"""Phase-transition sweeps over (K, Q or |V0| target, M)."""
from concurrent.futures import ThreadPoolExecutor
import contextlib
from dataclasses import asdict, dataclass
import itertools
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from sqlalchemy.orm import Session

from mcfli.core.grid import Grid, make_grid
from mcfli.core.layout import random_layout_1d
from mcfli.core.rng import child_seed
from mcfli.exceptions import ConfigError
from mcfli.harness.ledger import record_sweep
from mcfli.harness.trial import TrialResult, run_trial
from mcfli.schemas.sweep import SweepCellSchema, SweepResultSchema, SweepSpec

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "K", "Q", "M", "visibility_target", "trials", "success_rate",
    "mean_visibilities", "std_visibilities", "mean_snr_db", "mean_iterations",
]
FLOAT_FORMAT = "%.10g"
TARGET_TOLERANCE = 0.02
# first sub-stream index of pilot layouts, disjoint from trial streams (K >= 0)
PILOT_STREAM = 2 ** 32


@dataclass(frozen=True)
class SweepCell:
    K: int
    Q: int
    M: int
    visibility_target: Optional[float]
    trials: int
    success_rate: float
    mean_visibilities: float
    std_visibilities: float
    mean_snr_db: float
    mean_iterations: float

    def to_schema(self) -> SweepCellSchema:
        return SweepCellSchema(**asdict(self))


def _cell_frame(cells: Sequence[SweepCell]) -> pd.DataFrame:
    return pd.DataFrame([asdict(cell) for cell in cells], columns=CSV_COLUMNS)


class _CsvRowWriter:
    """Writes the CSV header on entry and one row per finished cell."""

    def __init__(self, path: Path):
        self.path = path
        self.handle = None

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.handle = self.path.open("w", newline="")
        pd.DataFrame(columns=CSV_COLUMNS).to_csv(self.handle, index=False)
        return self

    def write(self, cell: SweepCell) -> None:
        _cell_frame([cell]).to_csv(self.handle, header=False, index=False, float_format=FLOAT_FORMAT)
        self.handle.flush()

    def __exit__(self, *exc):
        self.handle.close()
        return False


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: List[SweepCell]

    def frame(self) -> pd.DataFrame:
        return _cell_frame(self.cells)

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info("Wrote %d sweep cells to %s", len(self.cells), path)
        return path

    def to_schema(self) -> SweepResultSchema:
        return SweepResultSchema(spec=self.spec, cells=[cell.to_schema() for cell in self.cells])


def mean_visibilities(grid: Grid, Q: int, master_seed: int, pilots: int, stream: int = 0) -> float:
    counts = [
        random_layout_1d(grid, Q, child_seed(master_seed, PILOT_STREAM + stream, Q, p)).num_visibilities
        for p in range(pilots)
    ]
    return float(np.mean(counts))


def select_cores(grid: Grid, target: float, master_seed: int, pilots: int = 16, stream: int = 0) -> int:
    """Smallest Q whose mean |V0| over pilot layouts reaches the target within 2 %.

    When no Q lands within tolerance the closest one is returned with a warning.
    """
    best_Q, best_gap = 2, np.inf
    for Q in range(2, grid.N + 1):
        mean = mean_visibilities(grid, Q, master_seed, pilots, stream)
        gap = abs(mean - target) / target
        if gap < best_gap:
            best_Q, best_gap = Q, gap
        if gap <= TARGET_TOLERANCE:
            logger.info("|V0| target %.1f: Q=%d (mean %.1f)", target, Q, mean)
            return Q
        if mean > target:
            break
    logger.warning("|V0| target %.1f not bracketed within %.0f%%, using Q=%d",
                   target, 100 * TARGET_TOLERANCE, best_Q)
    return best_Q


def trial_seed(master_seed: int, K: int, Q: int, M: int, trial: int) -> int:
    return child_seed(master_seed, K, Q, M, trial)


def _aggregate(K: int, Q: int, M: int, target: Optional[float], trials: Sequence[TrialResult]) -> SweepCell:
    visibilities = np.array([t.num_visibilities for t in trials], dtype=float)
    return SweepCell(
        K=K,
        Q=Q,
        M=M,
        visibility_target=target,
        trials=len(trials),
        success_rate=float(np.mean([t.success for t in trials])),
        mean_visibilities=float(visibilities.mean()),
        std_visibilities=float(visibilities.std()),
        mean_snr_db=float(np.mean([t.snr_db for t in trials])),
        mean_iterations=float(np.mean([t.iterations for t in trials])),
    )


def run_sweep(spec: SweepSpec, threads: int = 1, db: Optional[Session] = None) -> SweepResult:
    """
    Evaluate every (K, Q, M) cell of ``spec`` with ``spec.trials`` trials each.

    Args:
        spec (SweepSpec): sweep axes, trial count, threshold, master seed, solver
        threads (int): worker threads; results do not depend on it
        db (Session): optional ledger session, the run is recorded when given

    Returns:
        SweepResult: one cell per (K, Q, M); when ``spec.output_path`` is set each
        finished cell is appended to that CSV from the calling thread

    Raises:
        ConfigError: for 2-D sweeps
    """
    if spec.dim != 1:
        raise ConfigError("phase-transition sweeps run on 1-D grids")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    grid = make_grid(spec.dim, spec.n1, spec.fov)

    if spec.Q_values is not None:
        q_axis = [(Q, None) for Q in spec.Q_values]
    else:
        q_axis = [
            (select_cores(grid, target, spec.master_seed, spec.pilot_layouts, stream), target)
            for stream, target in enumerate(spec.visibility_targets)
        ]
    for Q, _ in q_axis:
        if Q > grid.N:
            raise ConfigError(f"Q={Q} exceeds the grid size {grid.N}")

    cells = list(itertools.product(spec.K_values, q_axis, spec.M_values))
    tasks = [(K, Q, M, t) for K, (Q, _), M in cells for t in range(spec.trials)]
    logger.info("Sweep: %d cells x %d trials on %d thread(s)", len(cells), spec.trials, threads)

    def work(task):
        K, Q, M, t = task
        return run_trial(K, Q, M, trial_seed(spec.master_seed, K, Q, M, t), spec.solver, grid,
                         spec.solver_config, spec.threshold_db)

    results = []
    csv_path = Path(spec.output_path) if spec.output_path else None
    with contextlib.ExitStack() as stack:
        if threads == 1:
            outcomes = map(work, tasks)
        else:
            pool = stack.enter_context(ThreadPoolExecutor(max_workers=threads))
            outcomes = pool.map(work, tasks)
        writer = stack.enter_context(_CsvRowWriter(csv_path)) if csv_path else None
        # pool.map yields in task order, so rows leave the calling thread in cell order
        for K, (Q, target), M in cells:
            cell = _aggregate(K, Q, M, target, list(itertools.islice(outcomes, spec.trials)))
            logger.info("cell K=%d Q=%d M=%d: success %.3f, mean |V0| %.1f",
                        K, Q, M, cell.success_rate, cell.mean_visibilities)
            if writer is not None:
                writer.write(cell)
            results.append(cell)

    result = SweepResult(spec, results)
    if csv_path is not None:
        logger.info("Wrote %d sweep cells to %s", len(results), csv_path)
    if db is not None:
        record_sweep(db, result, None if csv_path is None else str(csv_path))
    return result


def transition_midpoint(M_values, success_rates, level: float = 0.5) -> Optional[float]:
    """M at which the success rate first crosses ``level``, by linear interpolation."""
    order = np.argsort(M_values, kind="stable")
    ms = np.asarray(M_values, dtype=float)[order]
    rates = np.asarray(success_rates, dtype=float)[order]
    if rates.size == 0:
        return None
    if rates[0] >= level:
        return float(ms[0])
    for i in range(1, rates.size):
        if rates[i] >= level > rates[i - 1]:
            return float(ms[i - 1] + (level - rates[i - 1]) * (ms[i] - ms[i - 1]) / (rates[i] - rates[i - 1]))
    return None
