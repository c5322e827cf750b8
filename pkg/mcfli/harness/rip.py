from dataclasses import dataclass
import itertools
import logging
from typing import Optional

import numpy as np

from mcfli.core.grid import Grid
from mcfli.core.layout import random_layout_1d
from mcfli.core.rng import child_seed
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import ConfigError
from mcfli.harness.trial import LAYOUT_STREAM, SCENE_STREAM, SKETCH_STREAM, default_grid
from mcfli.schemas.reports import RipReportSchema
from mcfli.sensing.combined import CombinedOperator

logger = logging.getLogger(__name__)

MIN_TRIALS = 100


@dataclass(frozen=True)
class RipEstimate:
    K0: int
    Q: int
    M: int
    trials: int
    num_visibilities: int
    lower: float
    upper: float
    envelope: float
    isometry_low: float
    isometry_high: float

    @property
    def lower_ratio(self) -> float:
        return self.lower / self.envelope

    @property
    def upper_ratio(self) -> float:
        return self.upper / self.envelope

    def to_schema(self) -> RipReportSchema:
        return RipReportSchema(
            K0=self.K0, Q=self.Q, M=self.M, trials=self.trials, num_visibilities=self.num_visibilities,
            lower=self.lower, upper=self.upper, envelope=self.envelope,
            lower_ratio=self.lower_ratio, upper_ratio=self.upper_ratio,
            isometry_low=self.isometry_low, isometry_high=self.isometry_high,
        )


def random_sparse_unit(N: int, K0: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm, zero-mean vector supported on K0 random entries."""
    v = np.zeros(N)
    support = rng.choice(N, size=K0, replace=False)
    values = rng.standard_normal(K0)
    values -= values.mean()
    v[support] = values
    return v / np.linalg.norm(v)


def l1_ratio(operator: CombinedOperator, v: np.ndarray) -> float:
    """(1/M) ||B v||_1 / ||v||."""
    return float(np.abs(operator.forward(v)).sum() / operator.M / np.linalg.norm(v))


def estimate_rip_constants(
    K0: int,
    Q: int,
    M: int,
    trials: int,
    seed: int,
    grid: Optional[Grid] = None,
) -> RipEstimate:
    """Empirical l2/l1 sandwich constants of B over random K0-sparse zero-mean vectors.

    Also reports the range of ||R F v|| sqrt(N / |V0|) over the same vectors,
    the l2/l2 isometry of the partial Fourier map normalized to 1 on average.
    """
    if trials < MIN_TRIALS:
        raise ConfigError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if K0 < 2:
        raise ConfigError("zero-mean sparse vectors need K0 >= 2")
    grid = grid or default_grid()
    layout = random_layout_1d(grid, Q, child_seed(seed, LAYOUT_STREAM))
    sketches = draw_sketches(Q, M, child_seed(seed, SKETCH_STREAM))
    operator = CombinedOperator(layout, sketches)
    rng = np.random.default_rng(child_seed(seed, SCENE_STREAM))

    off = layout.index_map[~np.eye(Q, dtype=bool)]
    bins = np.unique(off[off != 0])
    ratios = np.empty(trials)
    isometry = np.empty(trials)
    for t in range(trials):
        v = random_sparse_unit(grid.N, K0, rng)
        ratios[t] = l1_ratio(operator, v)
        isometry[t] = np.linalg.norm(grid.fft(v)[bins]) * np.sqrt(grid.N / max(bins.size, 1))

    envelope = grid.scaling * np.sqrt(bins.size) / np.sqrt(grid.N)
    estimate = RipEstimate(K0, Q, M, trials, int(bins.size), float(ratios.min()), float(ratios.max()),
                           float(envelope), float(isometry.min()), float(isometry.max()))
    logger.info("RIP K0=%d Q=%d M=%d: [%.4g, %.4g], envelope %.4g",
                K0, Q, M, estimate.lower, estimate.upper, envelope)
    return estimate


def exhaustive_two_sparse(operator: CombinedOperator) -> tuple[float, float]:
    """Exact extremes of (1/M)||B v||_1 over v = (e_j - e_k)/sqrt(2)."""
    N = operator.input_shape[0]
    lo, hi = np.inf, 0.0
    for j, k in itertools.combinations(range(N), 2):
        v = np.zeros(N)
        v[j], v[k] = 1.0, -1.0
        ratio = l1_ratio(operator, v / np.sqrt(2.0))
        lo, hi = min(lo, ratio), max(hi, ratio)
    return float(lo), float(hi)
