"""Illumination modes: speckle fields, raster scanning and speckle-illumination sensing."""
from dataclasses import dataclass
import logging
from typing import Literal, Optional

import numpy as np
from scipy import fft as sfft

from mcfli.core.grid import Grid
from mcfli.core.layout import CoreLayout, ON_GRID_TOLERANCE
from mcfli.core.scene import SceneImage
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError, GridMismatchError
from mcfli.sensing.interferometric import interferometric_matrix

logger = logging.getLogger(__name__)

MAX_OVERSAMPLING = 16
MAX_FFT_SIZE = 2 ** 22
_PIXEL_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class SpeckleField:
    intensity: np.ndarray
    sketch: np.ndarray


def _core_bins(layout: CoreLayout) -> np.ndarray:
    """Core positions in units of the lambda z / L lattice."""
    return layout.positions * layout.grid.fov / layout.grid.lambda_z


def _oversampling(layout: CoreLayout) -> Optional[int]:
    bins = _core_bins(layout)
    for factor in range(1, MAX_OVERSAMPLING + 1):
        scaled = bins * factor
        if np.abs(scaled - np.rint(scaled)).max() <= ON_GRID_TOLERANCE * factor:
            return factor
    return None


def _field_fft(layout: CoreLayout, sketch: np.ndarray, factor: int) -> np.ndarray:
    grid = layout.grid
    size = factor * grid.n1
    impulses = np.zeros((size,) * grid.dim, dtype=complex)
    idx = np.rint(_core_bins(layout) * factor).astype(np.int64) % size
    np.add.at(impulses, tuple(idx.T), sketch)
    # unnormalized inverse DFT: sum_q alpha_q exp(+i 2 pi m_q t / size)
    field = sfft.ifftn(impulses, norm="forward")
    pixels = np.arange(-grid.n1 // 2, grid.n1 // 2) % size
    return field[np.ix_(*([pixels] * grid.dim))].ravel()


def _field_direct(layout: CoreLayout, sketch: np.ndarray) -> np.ndarray:
    grid = layout.grid
    x = grid.coordinates()
    field = np.empty(grid.N, dtype=complex)
    for start in range(0, grid.N, _PIXEL_BLOCK):
        block = x[start:start + _PIXEL_BLOCK]
        field[start:start + block.shape[0]] = np.exp(
            2j * np.pi * (block @ layout.positions.T) / grid.lambda_z) @ sketch
    return field


def speckle(
    layout: CoreLayout,
    sketch,
    grid: Optional[Grid] = None,
    vignette: Optional[np.ndarray] = None,
    method: Literal["auto", "fft", "direct"] = "auto",
) -> SpeckleField:
    """Far-field intensity w(x) |sum_q alpha_q exp(i 2 pi p_q.x / (lambda z))|^2 on the grid.

    The FFT path places the core amplitudes on an (oversampled) impulse map and
    needs the cores on a rational fraction of the lambda z / L lattice; the
    direct path sums per pixel.
    """
    if grid is not None and grid != layout.grid:
        raise GridMismatchError("speckle grid differs from the layout grid")
    grid = layout.grid
    sketch = np.asarray(sketch, dtype=complex).ravel()
    if sketch.size != layout.Q:
        raise DimensionError(f"sketch length {sketch.size} differs from core count {layout.Q}")

    factor = _oversampling(layout) if method != "direct" else None
    if factor is not None and (factor * grid.n1) ** grid.dim > MAX_FFT_SIZE:
        factor = None
    if method == "fft" and factor is None:
        raise DimensionError("cores are not on a lattice the FFT path can represent")
    field = _field_direct(layout, sketch) if factor is None else _field_fft(layout, sketch, factor)

    intensity = np.abs(field) ** 2
    if vignette is not None:
        intensity = intensity * np.asarray(vignette, dtype=float).ravel()
    return SpeckleField(grid.reshape(intensity), sketch)


def mean_speckle(layout: CoreLayout, vignette: Optional[np.ndarray] = None) -> np.ndarray:
    """Expected speckle intensity Q w(x) under unit-modulus random sketches, flattened."""
    w = np.ones(layout.grid.N) if vignette is None else np.asarray(vignette, dtype=float).ravel()
    return layout.Q * w


def _steering(layout: CoreLayout, tilt) -> np.ndarray:
    tilt = np.asarray(tilt, dtype=float).ravel()
    if tilt.size != layout.grid.dim:
        raise DimensionError(f"tilt must have {layout.grid.dim} components")
    return np.exp(-2j * np.pi * (layout.positions @ tilt) / layout.grid.lambda_z)


def rs_measure(scene: SceneImage, layout: CoreLayout, tilt) -> float:
    """Raster-scan measurement gamma^* I gamma for the beam steered to ``tilt``."""
    matrix = interferometric_matrix(scene, layout)
    gamma = _steering(layout, tilt)
    return float(np.vdot(gamma, matrix.data @ gamma).real)


def psf(layout: CoreLayout, grid: Optional[Grid] = None) -> np.ndarray:
    """Raster-scan point-spread map: response to a unit spike at the origin."""
    if grid is not None and grid != layout.grid:
        raise GridMismatchError("psf grid differs from the layout grid")
    grid = layout.grid
    return grid.reshape(grid.scaling * grid.ifft(layout.multiplicity.astype(complex)).real)


def rs_scan(scene: SceneImage, layout: CoreLayout) -> np.ndarray:
    """Raster scan over every on-grid tilt: the observed scene convolved with the PSF."""
    if scene.grid != layout.grid:
        raise GridMismatchError("scene and layout grids differ")
    grid = layout.grid
    spectrum = grid.fft(scene.vignetted()) * layout.multiplicity
    return grid.reshape(grid.scaling * np.sqrt(grid.N) * grid.ifft(spectrum).real)


def si_measure(scene: SceneImage, layout: CoreLayout, sketches: SketchBatch) -> tuple[np.ndarray, np.ndarray]:
    """Speckle-illumination sensing y = S^T f; columns of S are pixel-integrated speckles."""
    if scene.grid != layout.grid:
        raise GridMismatchError("scene and layout grids differ")
    if sketches.Q != layout.Q:
        raise DimensionError(f"sketch length {sketches.Q} differs from core count {layout.Q}")
    grid = layout.grid
    S = np.empty((grid.N, sketches.M))
    for m, alpha in enumerate(sketches.vectors):
        S[:, m] = speckle(layout, alpha, vignette=scene.vignette).intensity.ravel() * grid.pixel_area
    return S.T @ scene.vector, S


def si_debiased_model(S: np.ndarray, mean_speckle_values: np.ndarray) -> np.ndarray:
    """D S^T diag(mean)^-1 with D = I - 11^T / M; pixels with zero mean speckle are dropped."""
    S = np.asarray(S, dtype=float)
    mean = np.asarray(mean_speckle_values, dtype=float).ravel()
    if mean.size != S.shape[0]:
        raise DimensionError("mean speckle length differs from the pixel count")
    inverse = np.divide(1.0, mean, out=np.zeros_like(mean), where=mean > 0)
    St = S.T
    return (St - St.mean(axis=0)) * inverse
