from dataclasses import dataclass, field
import logging
import math
from typing import Optional

import numpy as np

from mcfli.core.grid import Grid
from mcfli.exceptions import LayoutError
from mcfli.schemas.core import LayoutSchema

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
ON_GRID_TOLERANCE = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoreLayout:
    """Core positions in the distal plane and the gridded visibilities they form.

    Visibility ``(j, k)`` is ``(p_j - p_k) / (lambda z)``; it is snapped to the
    nearest frequency bin of ``grid`` and the rounding distance (in bins) is
    kept in ``snap_residual``.
    """

    grid: Grid
    positions: np.ndarray
    name: str = "custom"
    index_map: np.ndarray = field(init=False, repr=False)
    snap_residual: np.ndarray = field(init=False, repr=False)
    multiplicity: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        if positions.ndim == 1:
            positions = positions[:, None]
        if positions.ndim != 2 or positions.shape[1] != self.grid.dim or positions.shape[0] < 1:
            raise LayoutError(
                f"positions must have shape (Q, {self.grid.dim}), got {np.shape(self.positions)}"
            )
        object.__setattr__(self, "positions", _frozen(positions))

        bins = (positions[:, None, :] - positions[None, :, :]) * self.grid.fov / self.grid.lambda_z
        snapped = np.rint(bins)
        residual = np.abs(bins - snapped).max(axis=-1)
        index_map = self.grid.frequency_index(snapped.astype(np.int64))
        multiplicity = np.bincount(index_map.ravel(), minlength=self.grid.N)

        object.__setattr__(self, "index_map", _frozen(index_map))
        object.__setattr__(self, "snap_residual", _frozen(residual))
        object.__setattr__(self, "multiplicity", _frozen(multiplicity))

    @property
    def Q(self) -> int:
        return self.positions.shape[0]

    def _off_diagonal(self) -> np.ndarray:
        return self.index_map[~np.eye(self.Q, dtype=bool)]

    @property
    def num_visibilities(self) -> int:
        """Number of distinct non-zero frequency bins hit by the layout."""
        off = self._off_diagonal()
        return int(np.unique(off[off != 0]).size)

    @property
    def distinct(self) -> bool:
        off = self._off_diagonal()
        return bool(np.unique(off).size == off.size and not np.any(off == 0))

    @property
    def max_snap_residual(self) -> float:
        return float(self.snap_residual.max())

    @property
    def on_grid(self) -> bool:
        return self.max_snap_residual <= ON_GRID_TOLERANCE

    def visibilities(self) -> np.ndarray:
        """Continuous visibility vectors, shape ``(Q, Q, dim)``."""
        return (self.positions[:, None, :] - self.positions[None, :, :]) / self.grid.lambda_z

    def subset(self, indices) -> "CoreLayout":
        return CoreLayout(self.grid, self.positions[np.asarray(indices)], name=f"{self.name}-subset")

    def to_schema(self) -> LayoutSchema:
        return LayoutSchema(grid=self.grid.to_schema(), positions=self.positions.tolist(), name=self.name)

    @classmethod
    def from_schema(cls, schema: LayoutSchema) -> "CoreLayout":
        return cls(Grid.from_schema(schema.grid), np.asarray(schema.positions, dtype=float), name=schema.name)


def random_layout_1d(grid: Grid, Q: int, seed) -> CoreLayout:
    """Q cores at distinct integer offsets of the ``lambda z / L`` lattice, offsets in [-N/2, N/2)."""
    if grid.dim != 1:
        raise LayoutError("random_layout_1d needs a 1-D grid")
    if Q < 2:
        raise LayoutError(f"need at least 2 cores, got {Q}")
    if Q > grid.N:
        raise LayoutError(f"cannot place {Q} cores on {grid.N} grid positions")
    rng = np.random.default_rng(seed)
    offsets = rng.choice(np.arange(-grid.N // 2, grid.N // 2), size=Q, replace=False)
    positions = offsets[:, None] * grid.lambda_z / grid.fov
    return CoreLayout(grid, positions, name="random-1d")


def fermat_spiral_layout(
    grid: Grid,
    Q: int,
    diameter: Optional[float] = None,
    snap: bool = False,
) -> CoreLayout:
    """Q cores on Fermat's golden spiral, radius growing as sqrt(q).

    ``diameter`` defaults to 90 % of the largest layout whose visibilities stay
    inside the frequency band of ``grid``. With ``snap`` the cores are moved to
    the ``lambda z / L`` lattice so every visibility is on-grid.
    """
    if grid.dim != 2:
        raise LayoutError("fermat_spiral_layout needs a 2-D grid")
    if Q < 1:
        raise LayoutError(f"need at least 1 core, got {Q}")
    if diameter is None:
        diameter = 0.9 * grid.lambda_z * grid.bandwidth / 2.0
    q = np.arange(Q)
    radius = np.sqrt(q) * (0.5 * diameter / math.sqrt(Q - 1) if Q > 1 else 0.0)
    angle = q * GOLDEN_ANGLE
    positions = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
    if snap:
        lattice = grid.lambda_z / grid.fov
        positions = np.rint(positions / lattice) * lattice
    layout = CoreLayout(grid, positions, name="fermat")
    logger.debug(
        "Fermat layout Q=%d: %d visibilities, distinct=%s, max snap residual %.3g",
        Q, layout.num_visibilities, layout.distinct, layout.max_snap_residual,
    )
    return layout


def subsample_layout(layout: CoreLayout, step: int) -> CoreLayout:
    """Keep every ``step``-th core."""
    if step < 1:
        raise LayoutError(f"step must be >= 1, got {step}")
    sub = layout.subset(np.arange(0, layout.Q, step))
    return CoreLayout(sub.grid, sub.positions, name=f"{layout.name}/{step}")
