from mcfli.calibration.fields import (
    GeneralizedOperator,
    WavefieldSet,
    estimate_vignette,
    fringe_cross_correlation,
    generalized_forward,
    generalized_matrix,
    predict_speckle,
    synth_fields,
)
from mcfli.calibration.psi import FringeStack, read_fringes, recover_fields, render_fringes, write_fringes

__all__ = [
    "WavefieldSet", "synth_fields", "predict_speckle", "estimate_vignette", "fringe_cross_correlation",
    "generalized_matrix", "GeneralizedOperator", "generalized_forward",
    "FringeStack", "render_fringes", "recover_fields", "write_fringes", "read_fringes",
]
