import logging
from typing import Literal, Optional

import numpy as np

from mcfli.core.hermitian import HermitianMatrix
from mcfli.core.layout import CoreLayout
from mcfli.core.scene import SceneImage
from mcfli.exceptions import DimensionError, GridMismatchError
from mcfli.sensing.operators import LinearOperator

logger = logging.getLogger(__name__)

# rows of the direct-sum phase table evaluated at once
_DIRECT_BLOCK = 8


def scatter_bins(matrix: np.ndarray, index_map: np.ndarray, size: int) -> np.ndarray:
    """Adjoint of the gather ``u[index_map]``: sums matrix entries into their bins."""
    flat = index_map.ravel()
    m = np.asarray(matrix).ravel()
    return (np.bincount(flat, weights=m.real, minlength=size)
            + 1j * np.bincount(flat, weights=m.imag, minlength=size))


class InterferometricOperator(LinearOperator):
    """Image (real, N samples) to the Q x Q interferometric matrix of ``layout``.

    ``mode="fft"`` evaluates one unitary FFT and gathers the gridded visibility
    bins; ``mode="direct"`` evaluates the Fourier sums at the exact visibilities
    (the reference path, only practical for small Q and N).
    """

    def __init__(self, layout: CoreLayout, mode: Literal["fft", "direct"] = "fft",
                 vignette: Optional[np.ndarray] = None) -> None:
        if mode not in ("fft", "direct"):
            raise ValueError(f"unknown mode {mode!r}")
        self.layout = layout
        self.grid = layout.grid
        self.mode = mode
        self.vignette = None if vignette is None else np.asarray(vignette, dtype=float).ravel()
        super().__init__((self.grid.N,), (layout.Q, layout.Q), float, complex)

    @property
    def scaling(self) -> float:
        return self.grid.scaling

    def _weighted(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float).ravel()
        if v.size != self.grid.N:
            raise DimensionError(f"expected {self.grid.N} samples, got {v.size}")
        return v if self.vignette is None else v * self.vignette

    def _phase_rows(self):
        x = self.grid.coordinates()
        nu = self.layout.visibilities()
        for start in range(0, self.layout.Q, _DIRECT_BLOCK):
            block = nu[start:start + _DIRECT_BLOCK]
            yield start, np.exp(-2j * np.pi * (block @ x.T))

    def forward(self, v):
        v = self._weighted(v)
        if self.mode == "fft":
            return self.scaling * self.grid.fft(v)[self.layout.index_map]
        out = np.empty((self.layout.Q, self.layout.Q), dtype=complex)
        for start, phases in self._phase_rows():
            out[start:start + phases.shape[0]] = self.grid.pixel_area * (phases @ v)
        return out

    def adjoint(self, H):
        H = np.asarray(H, dtype=complex)
        if H.shape != self.output_shape:
            raise DimensionError(f"expected a {self.output_shape} matrix, got {H.shape}")
        if self.mode == "fft":
            spectrum = scatter_bins(H, self.layout.index_map, self.grid.N)
            out = self.scaling * self.grid.ifft(spectrum).real
        else:
            out = np.zeros(self.grid.N)
            for start, phases in self._phase_rows():
                rows = H[start:start + phases.shape[0]]
                out += self.grid.pixel_area * np.einsum("jk,jks->s", rows, phases.conj()).real
        return out if self.vignette is None else out * self.vignette


def _check_grids(scene: SceneImage, layout: CoreLayout) -> None:
    if scene.grid != layout.grid:
        raise GridMismatchError(f"scene grid {scene.grid} differs from layout grid {layout.grid}")


def interferometric_matrix(scene: SceneImage, layout: CoreLayout,
                           mode: Literal["fft", "direct"] = "fft") -> HermitianMatrix:
    """Interferometric matrix of the observed (vignetted) scene."""
    _check_grids(scene, layout)
    return HermitianMatrix(InterferometricOperator(layout, mode).forward(scene.vignetted()))


def interferometric_rank_check(scene: SceneImage, layout: CoreLayout, rtol: float = 1e-8) -> int:
    """Numerical rank of the interferometric matrix (singular values above rtol * s_max)."""
    rank = interferometric_matrix(scene, layout).rank(rtol)
    logger.debug("interferometric rank %d for K=%s, Q=%d", rank, scene.sparsity, layout.Q)
    return rank


def frobenius_weighted_identity(scene: SceneImage, layout: CoreLayout) -> tuple[float, float]:
    """Both sides of ||I||_F^2 / scaling^2 = sum_l W_l |(F f)_l|^2, W the bin multiplicities."""
    _check_grids(scene, layout)
    matrix = interferometric_matrix(scene, layout)
    spectrum = layout.grid.fft(scene.vignetted())
    lhs = matrix.frobenius_norm ** 2 / layout.grid.scaling ** 2
    rhs = float(np.sum(layout.multiplicity * np.abs(spectrum) ** 2))
    return lhs, rhs


def restricted_energy(scene: SceneImage, layout: CoreLayout) -> float:
    """||R F f||^2 with R restricting to the distinct non-zero visibility bins."""
    off = layout.index_map[~np.eye(layout.Q, dtype=bool)]
    bins = np.unique(off[off != 0])
    return float(np.sum(np.abs(layout.grid.fft(scene.vignetted())[bins]) ** 2))
