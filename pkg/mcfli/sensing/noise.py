import logging
from typing import Optional

import numpy as np

from mcfli.core.layout import CoreLayout
from mcfli.core.measurement import MeasurementRecord, NoiseDescriptor
from mcfli.core.scene import SceneImage
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import UnknownNoiseModelError
from mcfli.sensing.interferometric import interferometric_matrix
from mcfli.sensing.srop import debias, srop_forward

logger = logging.getLogger(__name__)

NOISE_MODELS = ("none", "gaussian", "uniform")


def add_noise(y, model: str = "none", seed=None, level: float = 0.0) -> tuple[np.ndarray, NoiseDescriptor]:
    """Additive noise; ``level`` is the standard deviation (gaussian) or half-width (uniform).

    Returns the noisy vector and a descriptor whose ``epsilon`` is ||n||_1.
    """
    y = np.asarray(y, dtype=float)
    if model not in NOISE_MODELS:
        raise UnknownNoiseModelError(f"unknown noise model {model!r}, expected one of {NOISE_MODELS}")
    if model == "none" or level == 0:
        return y.copy(), NoiseDescriptor(model, float(level), 0.0)
    rng = np.random.default_rng(seed)
    if model == "gaussian":
        n = rng.normal(0.0, level, size=y.shape)
    else:
        n = rng.uniform(-level, level, size=y.shape)
    return y + n, NoiseDescriptor(model, float(level), float(np.abs(n).sum()))


def acquire(
    scene: SceneImage,
    layout: CoreLayout,
    sketches: SketchBatch,
    noise: str = "none",
    level: float = 0.0,
    seed: Optional[int] = None,
) -> MeasurementRecord:
    """Simulated SROP acquisition of a scene.

    The recorded ``epsilon`` is the l1 norm of the debiased noise, the budget
    that applies to ``debiased``.
    """
    clean = srop_forward(interferometric_matrix(scene, layout), sketches)
    noisy, descriptor = add_noise(clean, noise, seed, level)
    centered_budget = float(np.abs(debias(noisy - clean)).sum()) if descriptor.epsilon else 0.0
    logger.debug("acquired %d SROP measurements, noise %s (eps=%.3g)", sketches.M, noise, centered_budget)
    return MeasurementRecord(
        raw=noisy,
        debiased=debias(noisy),
        noise=NoiseDescriptor(descriptor.model, descriptor.level, centered_budget),
        mode="SROP",
        seed=seed,
    )
