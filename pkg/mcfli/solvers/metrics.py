import math

import numpy as np

from mcfli.config import SNR_CAP_DB
from mcfli.exceptions import DimensionError


def _ratio_db(signal: float, error: float) -> float:
    if error == 0:
        return SNR_CAP_DB
    if signal == 0:
        raise DimensionError("SNR undefined for a zero ground truth")
    return min(20.0 * math.log10(signal / error), SNR_CAP_DB)


def snr(estimate, truth) -> float:
    """20 log10(||f|| / ||f - estimate||) in dB; exact matches report SNR_CAP_DB."""
    estimate = np.asarray(estimate, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if estimate.shape != truth.shape:
        raise DimensionError("estimate and truth differ in size")
    return _ratio_db(float(np.linalg.norm(truth)), float(np.linalg.norm(truth - estimate)))


def vignetted_snr(estimate, truth, vignette) -> float:
    """SNR between the vignetted ground truth w*f and the vignetted estimate."""
    estimate = np.asarray(estimate, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    w = np.broadcast_to(np.asarray(vignette, dtype=float).ravel(), truth.shape)
    if estimate.shape != truth.shape:
        raise DimensionError("estimate and truth differ in size")
    signal = float(np.linalg.norm(w * truth))
    if signal == 0:
        raise DimensionError("vignetted SNR undefined for a zero ground truth")
    return _ratio_db(signal, float(np.linalg.norm(w * (truth - estimate))))
