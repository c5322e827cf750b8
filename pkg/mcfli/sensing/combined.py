from typing import Optional

import numpy as np

from mcfli.core.layout import CoreLayout
from mcfli.core.scene import SceneImage
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError, GridMismatchError
from mcfli.sensing.interferometric import InterferometricOperator
from mcfli.sensing.operators import LinearOperator
from mcfli.sensing.srop import SropOperator


class CombinedOperator(LinearOperator):
    """v -> scaling * A_c(T(F (w v))): debiased SROP of the gridded interferometric matrix."""

    def __init__(self, layout: CoreLayout, sketches: SketchBatch,
                 vignette: Optional[np.ndarray] = None) -> None:
        if sketches.Q != layout.Q:
            raise DimensionError(f"sketch length {sketches.Q} differs from core count {layout.Q}")
        self.layout = layout
        self.sketches = sketches
        self.interferometric = InterferometricOperator(layout, "fft", vignette)
        self.srop = SropOperator(sketches, centered=True)
        super().__init__((layout.grid.N,), (sketches.M,), float, float)

    @property
    def grid(self):
        return self.layout.grid

    @property
    def M(self) -> int:
        return self.sketches.M

    def forward(self, v):
        return self.srop.forward(self.interferometric.forward(v))

    def adjoint(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.M,):
            raise DimensionError(f"expected {self.M} measurements, got shape {z.shape}")
        return self.interferometric.adjoint(self.srop.adjoint(z))


def combined_forward(operator: CombinedOperator, scene) -> np.ndarray:
    if isinstance(scene, SceneImage):
        if scene.grid != operator.grid:
            raise GridMismatchError("scene and operator grids differ")
        scene = scene.vector
    return operator.forward(scene)


def combined_adjoint(operator: CombinedOperator, z) -> np.ndarray:
    return operator.adjoint(z)
