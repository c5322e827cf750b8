from mcfli.core.grid import Grid, make_grid
from mcfli.core.layout import CoreLayout, fermat_spiral_layout, random_layout_1d, subsample_layout
from mcfli.core.hermitian import HermitianMatrix, random_hermitian
from mcfli.core.sketches import SketchBatch, draw_sketches
from mcfli.core.scene import (
    SceneImage,
    cartoon_scene,
    gaussian_vignette,
    make_scene,
    sparse_scene,
    spike_scene,
)
from mcfli.core.measurement import MeasurementRecord, NoiseDescriptor
from mcfli.core.rng import child_seed, make_rng

__all__ = [
    "Grid", "make_grid",
    "CoreLayout", "random_layout_1d", "fermat_spiral_layout", "subsample_layout",
    "HermitianMatrix", "random_hermitian",
    "SketchBatch", "draw_sketches",
    "SceneImage", "make_scene", "sparse_scene", "spike_scene", "cartoon_scene", "gaussian_vignette",
    "MeasurementRecord", "NoiseDescriptor",
    "child_seed", "make_rng",
]
