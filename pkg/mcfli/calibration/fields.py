from dataclasses import dataclass
import logging
from typing import Literal, Optional

import numpy as np

from mcfli.core.grid import Grid
from mcfli.core.hermitian import HermitianMatrix
from mcfli.core.io import write_array
from mcfli.core.layout import CoreLayout
from mcfli.core.scene import SceneImage
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError, GridMismatchError
from mcfli.sensing.operators import LinearOperator
from mcfli.sensing.srop import debias

logger = logging.getLogger(__name__)

PERTURBATIONS = ("none", "amplitude-ripple", "phase-aberration")
_SKETCH_BLOCK = 64


@dataclass(frozen=True, eq=False)
class WavefieldSet:
    """Per-core complex fields, shape ``(Q, N)`` on ``grid``.

    Recovered sets are ``referenced``: every field carries the conjugate phase
    of the reference core. ``mask`` marks the pixels where recovery was done.
    """

    grid: Grid
    fields: np.ndarray
    reference: int = 0
    referenced: bool = False
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        fields = np.array(self.fields, dtype=complex).reshape(-1, self.grid.N)
        if not 0 <= self.reference < fields.shape[0]:
            raise DimensionError(f"reference core {self.reference} out of range")
        fields.setflags(write=False)
        object.__setattr__(self, "fields", fields)

    @property
    def Q(self) -> int:
        return self.fields.shape[0]

    def save(self, path):
        return write_array(path, self.fields.reshape((self.Q,) + self.grid.shape))


def _perturbation(kind: str, delta: float, grid: Grid, Q: int, seed) -> np.ndarray:
    if kind not in PERTURBATIONS:
        raise DimensionError(f"unknown perturbation {kind!r}, expected one of {PERTURBATIONS}")
    if kind == "none" or delta == 0:
        return np.ones((Q, grid.N), dtype=complex)
    rng = np.random.default_rng(seed)
    x = grid.coordinates()
    if kind == "amplitude-ripple":
        k = rng.integers(1, 4, size=(Q, grid.dim))
        phase = rng.uniform(0, 2 * np.pi, size=(Q, 1))
        return 1.0 + delta * np.cos(2 * np.pi * (k @ x.T) / grid.fov + phase) + 0j
    # smooth aberration: random quadratic polynomial in normalized coordinates
    xn = 2.0 * x / grid.fov
    if grid.dim == 1:
        monomials = np.stack([xn[:, 0] ** 2])
    else:
        monomials = np.stack([xn[:, 0] ** 2, xn[:, 0] * xn[:, 1], xn[:, 1] ** 2])
    coefficients = rng.uniform(-1.0, 1.0, size=(Q, monomials.shape[0]))
    return np.exp(1j * delta * 2 * np.pi * (coefficients @ monomials))


def synth_fields(
    layout: CoreLayout,
    grid: Optional[Grid] = None,
    perturbation: Literal["none", "amplitude-ripple", "phase-aberration"] = "none",
    delta: float = 0.0,
    vignette: Optional[np.ndarray] = None,
    seed=0,
) -> WavefieldSet:
    """E_q(x) = sqrt(w(x)) a_q(x) exp(i 2 pi p_q.x / (lambda z)); ``none`` gives a_q = 1."""
    if grid is not None and grid != layout.grid:
        raise GridMismatchError("field grid differs from the layout grid")
    grid = layout.grid
    amplitude = _perturbation(perturbation, delta, grid, layout.Q, seed)
    x = grid.coordinates()
    carriers = np.exp(2j * np.pi * (layout.positions @ x.T) / grid.lambda_z)
    fields = amplitude * carriers
    if vignette is not None:
        fields = fields * np.sqrt(np.asarray(vignette, dtype=float).ravel())
    logger.debug("synthesized %d fields, perturbation %s (delta=%g)", layout.Q, perturbation, delta)
    return WavefieldSet(grid, fields)


def predict_speckle(fields: WavefieldSet, sketch) -> np.ndarray:
    """|sum_q alpha_q E_q|^2, flattened."""
    sketch = np.asarray(sketch, dtype=complex).ravel()
    if sketch.size != fields.Q:
        raise DimensionError(f"sketch length {sketch.size} differs from core count {fields.Q}")
    return np.abs(sketch @ fields.fields) ** 2


def estimate_vignette(fields: WavefieldSet) -> np.ndarray:
    """w = mean_q |E_q|^2, in grid shape."""
    return fields.grid.reshape(np.mean(np.abs(fields.fields) ** 2, axis=0))


def fringe_cross_correlation(a, b) -> float:
    """Normalized (zero-mean) cross-correlation of two intensity maps."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    a = a - a.mean()
    b = b - b.mean()
    denominator = np.linalg.norm(a) * np.linalg.norm(b)
    return float(a @ b / denominator) if denominator > 0 else 0.0


def generalized_matrix(fields: WavefieldSet, h) -> HermitianMatrix:
    """G[h]_jk = sum_x conj(E_j(x)) E_k(x) h(x) dA. Small problems only."""
    h = np.asarray(h, dtype=float).ravel()
    if h.size != fields.grid.N:
        raise DimensionError(f"expected {fields.grid.N} samples, got {h.size}")
    E = fields.fields
    return HermitianMatrix(fields.grid.pixel_area * (E.conj() * h) @ E.T)


class GeneralizedOperator(LinearOperator):
    """h -> debiased <S(.; alpha_m), h>, with speckles predicted from the fields.

    The generalized interferometric matrix is never formed.
    """

    def __init__(self, fields: WavefieldSet, sketches: SketchBatch) -> None:
        if sketches.Q != fields.Q:
            raise DimensionError(f"sketch length {sketches.Q} differs from core count {fields.Q}")
        self.fields = fields
        self.sketches = sketches
        super().__init__((fields.grid.N,), (sketches.M,), float, float)

    @property
    def grid(self) -> Grid:
        return self.fields.grid

    def _speckle_blocks(self):
        A = self.sketches.vectors
        for start in range(0, A.shape[0], _SKETCH_BLOCK):
            yield start, np.abs(A[start:start + _SKETCH_BLOCK] @ self.fields.fields) ** 2

    def raw(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=float).ravel()
        if h.size != self.grid.N:
            raise DimensionError(f"expected {self.grid.N} samples, got {h.size}")
        z = np.empty(self.sketches.M)
        for start, S in self._speckle_blocks():
            z[start:start + S.shape[0]] = S @ h
        return self.grid.pixel_area * z

    def forward(self, h):
        return debias(self.raw(h))

    def adjoint(self, u):
        u = debias(np.asarray(u, dtype=float).ravel())
        if u.size != self.sketches.M:
            raise DimensionError(f"expected {self.sketches.M} measurements, got {u.size}")
        out = np.zeros(self.grid.N)
        for start, S in self._speckle_blocks():
            out += u[start:start + S.shape[0]] @ S
        return self.grid.pixel_area * out


def generalized_forward(fields: WavefieldSet, sketches: SketchBatch, scene: SceneImage) -> np.ndarray:
    """Debiased generalized measurements of ``scene`` (vignetting is carried by the fields)."""
    if scene.grid != fields.grid:
        raise GridMismatchError("scene and field grids differ")
    return GeneralizedOperator(fields, sketches).forward(scene.vector)
