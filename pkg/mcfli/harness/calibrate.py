import logging
from pathlib import Path
from typing import Optional

import numpy as np

from mcfli.calibration.fields import fringe_cross_correlation, predict_speckle, synth_fields
from mcfli.calibration.psi import recover_fields, render_fringes, write_fringes
from mcfli.core.grid import make_grid
from mcfli.core.io import write_json
from mcfli.core.layout import CoreLayout, fermat_spiral_layout
from mcfli.core.rng import child_seed
from mcfli.core.scene import gaussian_vignette
from mcfli.core.sketches import draw_sketches
from mcfli.schemas.calibration import CalibrationReportSchema

logger = logging.getLogger(__name__)


def run_calibration(
    layout: Optional[CoreLayout] = None,
    noise_sigma: float = 0.0,
    perturbation: str = "none",
    delta: float = 0.0,
    num_sketches: int = 20,
    seed: int = 0,
    vignette_width: float = 0.3,
    out=None,
) -> CalibrationReportSchema:
    """Synthesize fields, render 8-step fringes, recover the fields and score speckle prediction."""
    if layout is None:
        layout = fermat_spiral_layout(make_grid(2, 64, 1.0), 110)
    w = gaussian_vignette(layout.grid, vignette_width)
    truth = synth_fields(layout, perturbation=perturbation, delta=delta, vignette=w,
                         seed=child_seed(seed, 0))
    stack = render_fringes(truth, noise_sigma, seed=child_seed(seed, 1))
    recovered = recover_fields(stack)

    sketches = draw_sketches(layout.Q, num_sketches, child_seed(seed, 2))
    scores = [
        fringe_cross_correlation(predict_speckle(recovered, alpha), predict_speckle(truth, alpha))
        for alpha in sketches.vectors
    ]
    report = CalibrationReportSchema(
        num_cores=layout.Q,
        frames_rendered=stack.frame_count,
        noise_sigma=noise_sigma,
        masked_fraction=float(1.0 - recovered.mask.mean()),
        cross_correlations=scores,
        min_cross_correlation=float(np.min(scores)),
    )
    logger.info("Calibration Q=%d sigma=%g: min cross-correlation %.5f",
                layout.Q, noise_sigma, report.min_cross_correlation)
    if out is not None:
        out = Path(out)
        write_fringes(stack, out / "fringes")
        recovered.save(out / "fields.mcfa")
        write_json(out / "calibration.json", report)
    return report
