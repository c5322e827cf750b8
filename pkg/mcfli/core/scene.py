from dataclasses import dataclass
from typing import Optional

import numpy as np

from mcfli.core.grid import Grid
from mcfli.exceptions import DimensionError
from mcfli.schemas.core import SceneSchema


@dataclass(frozen=True, eq=False)
class SceneImage:
    """Real image on ``grid`` (centered order), with optional vignetting window."""

    grid: Grid
    values: np.ndarray
    vignette: Optional[np.ndarray] = None
    sparsity: Optional[int] = None
    support: Optional[np.ndarray] = None
    zero_mean: bool = False

    def __post_init__(self):
        values = np.array(self.grid.reshape(np.asarray(self.values, dtype=float)))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.vignette is not None:
            w = np.array(self.grid.reshape(np.asarray(self.vignette, dtype=float)))
            if np.any(w < 0):
                raise DimensionError("vignette must be nonnegative")
            w.setflags(write=False)
            object.__setattr__(self, "vignette", w)
        if self.support is not None:
            object.__setattr__(self, "support", np.asarray(self.support, dtype=np.int64))
            if self.sparsity is not None and self.support.size > self.sparsity:
                raise DimensionError("support larger than the declared sparsity")
        if self.zero_mean and abs(values.sum()) > 1e-9 * max(np.abs(values).sum(), 1.0):
            raise DimensionError("scene flagged zero-mean has nonzero sum")

    @property
    def vector(self) -> np.ndarray:
        return self.values.ravel()

    def vignetted(self) -> np.ndarray:
        """The observed object w * f, flattened."""
        if self.vignette is None:
            return self.vector
        return (self.values * self.vignette).ravel()

    def to_schema(self) -> SceneSchema:
        return SceneSchema(
            grid=self.grid.to_schema(),
            values=self.vector.tolist(),
            vignette=None if self.vignette is None else self.vignette.ravel().tolist(),
            sparsity=self.sparsity,
            support=None if self.support is None else self.support.tolist(),
            zero_mean=self.zero_mean,
        )

    @classmethod
    def from_schema(cls, schema: SceneSchema) -> "SceneImage":
        return cls(Grid.from_schema(schema.grid), np.asarray(schema.values), schema.vignette,
                   schema.sparsity, schema.support, schema.zero_mean)


def make_scene(grid: Grid, values, vignette=None, zero_mean: bool = False) -> SceneImage:
    return SceneImage(grid, values, vignette=vignette, zero_mean=zero_mean)


def sparse_scene(grid: Grid, K: int, seed, zero_mean: bool = True) -> SceneImage:
    """K-sparse Gaussian scene; values are centered on their support when ``zero_mean``."""
    if not 0 <= K <= grid.N:
        raise DimensionError(f"K must lie in [0, {grid.N}], got {K}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(grid.N, size=K, replace=False))
    values = np.zeros(grid.N)
    if K:
        amplitudes = rng.standard_normal(K)
        if zero_mean:
            amplitudes -= amplitudes.mean()
        values[support] = amplitudes
    return SceneImage(grid, values, sparsity=K, support=support, zero_mean=zero_mean)


def spike_scene(grid: Grid, K: int, seed, nonnegative: bool = True) -> SceneImage:
    """K on-grid Dirac spikes with amplitudes in [0.5, 1.5] (random signs unless nonnegative)."""
    if not 0 <= K <= grid.N:
        raise DimensionError(f"K must lie in [0, {grid.N}], got {K}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(grid.N, size=K, replace=False))
    amplitudes = rng.uniform(0.5, 1.5, size=K)
    if not nonnegative:
        amplitudes *= rng.choice([-1.0, 1.0], size=K)
    values = np.zeros(grid.N)
    values[support] = amplitudes
    return SceneImage(grid, values, sparsity=K, support=support)


def cartoon_scene(grid: Grid) -> SceneImage:
    """Two overlapping rectangles on a zero background."""
    if grid.dim != 2:
        raise DimensionError("cartoon_scene needs a 2-D grid")
    n = grid.n1
    values = np.zeros(grid.shape)
    values[n // 4: n // 2, 3 * n // 8: 5 * n // 8] = 1.0
    values[n // 2 - n // 16: 3 * n // 4, n // 4: n // 2] = 0.6
    return SceneImage(grid, values)


def gaussian_vignette(grid: Grid, width: float = 0.3) -> np.ndarray:
    """exp(-|x|^2 / (2 s^2)) with s = width * L, in grid shape."""
    if width <= 0:
        raise DimensionError(f"width must be positive, got {width}")
    s = width * grid.fov
    r2 = np.sum(grid.coordinates() ** 2, axis=1)
    return np.exp(-r2 / (2.0 * s * s)).reshape(grid.shape)
