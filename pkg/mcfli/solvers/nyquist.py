"""Deterministic recovery of constant-diagonal Hermitian matrices from Q(Q-1)+1 SROPs."""
import math

import numpy as np

from mcfli.core.hermitian import HermitianMatrix
from mcfli.core.sketches import SketchBatch
from mcfli.exceptions import DimensionError, MeasurementCountError


def nyquist_count(Q: int) -> int:
    return Q * (Q - 1) + 1


def nyquist_sketches(Q: int) -> SketchBatch:
    """e_q + e_r and e_q - i e_r for every pair q < r (lexicographic), then the closing vector.

    The closing vector is all ones, except for Q = 2 where (1, -1) is used
    because the all-ones sketch repeats the information of the pair.
    """
    if Q < 1:
        raise DimensionError(f"Q must be >= 1, got {Q}")
    vectors = []
    for q in range(Q):
        for r in range(q + 1, Q):
            for gamma in (1.0, -1j):
                v = np.zeros(Q, dtype=complex)
                v[q] = 1.0
                v[r] = gamma
                vectors.append(v)
    closing = np.ones(Q, dtype=complex)
    if Q == 2:
        closing[1] = -1.0
    vectors.append(closing)
    return SketchBatch(np.array(vectors), distribution="nyquist")


def nyquist_recover(y, Q: int = None) -> HermitianMatrix:
    """Closed-form inversion of the measurements of :func:`nyquist_sketches`."""
    y = np.asarray(y, dtype=float).ravel()
    if Q is None:
        root = (1 + math.isqrt(max(4 * y.size - 3, 0))) // 2
        Q = root if y.size >= 1 and nyquist_count(root) == y.size else None
        if Q is None:
            raise MeasurementCountError(f"{y.size} is not Q(Q-1)+1 for any Q")
    if y.size != nyquist_count(Q):
        raise MeasurementCountError(f"expected {nyquist_count(Q)} measurements for Q={Q}, got {y.size}")

    pairs = y[:-1]
    closing = y[-1]
    # h_1 + i h_{-i} = 2 I[q, r] + (2/Q)(1 + i) tr I
    combined = pairs[0::2] + 1j * pairs[1::2]
    total = combined.sum()
    if Q == 2:
        trace = 0.5 * (total.real + closing)
    else:
        # Re(total) = 1^T I 1 + (Q - 2) tr I, and the closing sketch measures 1^T I 1
        trace = (total.real - closing) / (Q - 2)

    matrix = np.zeros((Q, Q), dtype=complex)
    iu = np.triu_indices(Q, k=1)
    matrix[iu] = 0.5 * (combined - (2.0 / Q) * (1 + 1j) * trace)
    matrix = matrix + matrix.conj().T
    np.fill_diagonal(matrix, trace / Q)
    return HermitianMatrix(matrix)
