from dataclasses import dataclass

import numpy as np

from mcfli.exceptions import DimensionError, NotHermitianError


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Q x Q Hermitian matrix, split into diagonal and hollow parts on demand."""

    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        # Exact symmetrization; callers validate the asymmetry first
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @classmethod
    def from_array(cls, a, rtol: float = 1e-12) -> "HermitianMatrix":
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        scale = max(np.linalg.norm(a), np.finfo(float).tiny)
        if np.linalg.norm(a - a.conj().T) > rtol * scale:
            raise NotHermitianError("matrix is not Hermitian within tolerance")
        return cls(a)

    @property
    def order(self) -> int:
        return self.data.shape[0]

    @property
    def diagonal(self) -> "HermitianMatrix":
        return HermitianMatrix(np.diag(np.diag(self.data)))

    @property
    def hollow(self) -> "HermitianMatrix":
        h = self.data.copy()
        np.fill_diagonal(h, 0)
        return HermitianMatrix(h)

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def rank(self, rtol: float = 1e-8) -> int:
        s = np.linalg.svd(self.data, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > rtol * s[0]))

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.data + other.data)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.data - other.data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def random_hermitian(Q: int, rng: np.random.Generator, constant_diagonal: bool = False,
                     hollow: bool = False) -> HermitianMatrix:
    """Gaussian Hermitian test matrix."""
    g = rng.standard_normal((Q, Q)) + 1j * rng.standard_normal((Q, Q))
    h = 0.5 * (g + g.conj().T)
    if hollow:
        np.fill_diagonal(h, 0)
    elif constant_diagonal:
        np.fill_diagonal(h, rng.standard_normal())
    return HermitianMatrix(h)
