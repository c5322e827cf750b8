import logging

import numpy as np

from mcfli.core.hermitian import HermitianMatrix
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError, NotHermitianError
from mcfli.sensing.operators import LinearOperator

logger = logging.getLogger(__name__)

IMAG_RTOL = 1e-12


def _as_matrix(matrix, Q: int) -> np.ndarray:
    H = np.asarray(matrix.data if isinstance(matrix, HermitianMatrix) else matrix, dtype=complex)
    if H.shape != (Q, Q):
        raise DimensionError(f"matrix of shape {H.shape} does not match sketch length {Q}")
    return H


def _quadratic_forms(H: np.ndarray, A: np.ndarray, check: bool) -> np.ndarray:
    """alpha_m^* H alpha_m for every row of A."""
    values = np.sum(A.conj() * (A @ H.T), axis=1)
    if check:
        residue = np.abs(values.imag).max()
        scale = np.linalg.norm(H) * max(np.abs(A).max(), 1.0) ** 2
        if residue > IMAG_RTOL * max(scale, np.finfo(float).tiny):
            raise NotHermitianError(f"imaginary SROP residue {residue:.3e} above tolerance")
    return values.real


def debias(y) -> np.ndarray:
    """Remove the mean of a measurement vector."""
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise DimensionError("cannot debias an empty vector")
    return y - y.mean()


def srop_forward(matrix, sketches: SketchBatch, check: bool = True) -> np.ndarray:
    """Symmetric rank-one projections <alpha_m alpha_m^*, H> of a Hermitian matrix."""
    return _quadratic_forms(_as_matrix(matrix, sketches.Q), sketches.vectors, check)


def srop_adjoint(z, sketches: SketchBatch) -> np.ndarray:
    """sum_m z_m alpha_m alpha_m^*."""
    z = np.asarray(z, dtype=float)
    if z.shape != (sketches.M,):
        raise DimensionError(f"expected {sketches.M} measurements, got shape {z.shape}")
    A = sketches.vectors
    return (A.T * z) @ A.conj()


def average_sketch(sketches: SketchBatch) -> np.ndarray:
    """A^a = (1/M) sum_m alpha_m alpha_m^*."""
    A = sketches.vectors
    return A.T @ A.conj() / sketches.M


def srop_centered_forward(matrix, sketches: SketchBatch, check: bool = True) -> np.ndarray:
    """<alpha_m alpha_m^* - A^a, H>, only sensitive to the hollow part when |alpha| = 1."""
    H = _as_matrix(matrix, sketches.Q)
    mean_term = float(np.vdot(average_sketch(sketches), H).real)
    return _quadratic_forms(H, sketches.vectors, check) - mean_term


def srop_centered_adjoint(z, sketches: SketchBatch) -> np.ndarray:
    return srop_adjoint(debias(z), sketches)


def srop_pairwise_forward(matrix, sketches: SketchBatch, check: bool = True) -> np.ndarray:
    """Debiasing by consecutive differences: y_{2i+1} - y_{2i}."""
    if sketches.M % 2:
        raise DimensionError(f"pairwise debiasing needs an even number of sketches, got {sketches.M}")
    y = srop_forward(matrix, sketches, check)
    return y[1::2] - y[0::2]


class SropOperator(LinearOperator):
    """Hermitian Q x Q matrices to R^M; ``centered`` composes with the debiasing projector."""

    def __init__(self, sketches: SketchBatch, centered: bool = False, check: bool = False) -> None:
        self.sketches = sketches
        self.centered = centered
        self.check = check
        super().__init__((sketches.Q, sketches.Q), (sketches.M,), complex, float)

    def forward(self, H):
        y = srop_forward(H, self.sketches, self.check)
        return debias(y) if self.centered else y

    def adjoint(self, z):
        return srop_centered_adjoint(z, self.sketches) if self.centered else srop_adjoint(z, self.sketches)
