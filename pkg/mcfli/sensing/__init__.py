from mcfli.sensing.operators import LinearOperator, inner
from mcfli.sensing.interferometric import (
    InterferometricOperator,
    frobenius_weighted_identity,
    interferometric_matrix,
    interferometric_rank_check,
    restricted_energy,
)
from mcfli.sensing.srop import (
    SropOperator,
    debias,
    srop_adjoint,
    srop_centered_adjoint,
    srop_centered_forward,
    srop_forward,
    srop_pairwise_forward,
)
from mcfli.sensing.combined import CombinedOperator, combined_adjoint, combined_forward
from mcfli.sensing.illumination import (
    SpeckleField,
    mean_speckle,
    psf,
    rs_measure,
    rs_scan,
    si_debiased_model,
    si_measure,
    speckle,
)
from mcfli.sensing.noise import acquire, add_noise

__all__ = [
    "LinearOperator", "inner",
    "InterferometricOperator", "interferometric_matrix", "interferometric_rank_check",
    "frobenius_weighted_identity", "restricted_energy",
    "SropOperator", "srop_forward", "srop_adjoint", "srop_centered_forward", "srop_centered_adjoint",
    "srop_pairwise_forward", "debias",
    "CombinedOperator", "combined_forward", "combined_adjoint",
    "SpeckleField", "speckle", "mean_speckle", "psf", "rs_measure", "rs_scan", "si_measure",
    "si_debiased_model",
    "acquire", "add_noise",
]
