from dataclasses import dataclass
import math

import numpy as np
from scipy import fft as sfft

from mcfli.exceptions import InvalidGridError, DimensionError
from mcfli.schemas.core import GridSchema


@dataclass(frozen=True)
class Grid:
    """Sampling grid of the object plane and its Fourier dual.

    Pixel arrays are stored in centered order: index ``i`` along an axis holds
    the sample at ``s = i - n1/2`` pixels from the origin. Frequency arrays are
    stored in FFT order (bin ``l`` taken modulo ``n1`` per axis).
    """

    dim: int
    n1: int
    fov: float
    wavelength: float = 1.0
    depth: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvalidGridError(f"dim must be 1 or 2, got {self.dim}")
        if int(self.n1) != self.n1 or self.n1 < 2 or self.n1 % 2:
            raise InvalidGridError(f"n1 must be an even integer >= 2, got {self.n1}")
        if not self.fov > 0:
            raise InvalidGridError(f"fov must be positive, got {self.fov}")
        if not (self.wavelength > 0 and self.depth > 0):
            raise InvalidGridError("wavelength and depth must be positive")

    @property
    def N(self) -> int:
        return self.n1 ** self.dim

    @property
    def shape(self) -> tuple:
        return (self.n1,) * self.dim

    @property
    def pixel_pitch(self) -> float:
        return self.fov / self.n1

    @property
    def bandwidth(self) -> float:
        return self.n1 / self.fov

    @property
    def frequency_pitch(self) -> float:
        return self.bandwidth / self.n1

    @property
    def pixel_area(self) -> float:
        return self.pixel_pitch ** self.dim

    @property
    def scaling(self) -> float:
        """Constant relating the continuous Fourier transform to the unitary DFT."""
        return self.fov ** self.dim / math.sqrt(self.N)

    @property
    def lambda_z(self) -> float:
        return self.wavelength * self.depth

    def axis(self) -> np.ndarray:
        return (np.arange(self.n1) - self.n1 // 2) * self.pixel_pitch

    def coordinates(self) -> np.ndarray:
        """Pixel coordinates, shape ``(N, dim)``, in flattened row-major order."""
        axes = np.meshgrid(*([self.axis()] * self.dim), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=1)

    def reshape(self, v) -> np.ndarray:
        v = np.asarray(v)
        if v.size != self.N:
            raise DimensionError(f"expected {self.N} samples, got {v.size}")
        return v.reshape(self.shape)

    def fft(self, v) -> np.ndarray:
        """Unitary DFT of a centered image, returned flat in FFT order."""
        return sfft.fftn(sfft.ifftshift(self.reshape(v)), norm="ortho").ravel()

    def ifft(self, u) -> np.ndarray:
        """Adjoint (and inverse) of :meth:`fft`, returned flat in centered order."""
        return sfft.fftshift(sfft.ifftn(self.reshape(u), norm="ortho")).ravel()

    def frequency_index(self, bins) -> np.ndarray:
        """Flat FFT-order index of integer frequency bins, shape ``(..., dim)``."""
        bins = np.asarray(bins, dtype=np.int64) % self.n1
        return np.ravel_multi_index(tuple(np.moveaxis(bins, -1, 0)), self.shape)

    def to_schema(self) -> GridSchema:
        return GridSchema(dim=self.dim, n1=self.n1, fov=self.fov,
                          wavelength=self.wavelength, depth=self.depth)

    @classmethod
    def from_schema(cls, schema: GridSchema) -> "Grid":
        return cls(schema.dim, schema.n1, schema.fov, schema.wavelength, schema.depth)


def make_grid(dim: int, n1: int, fov: float, wavelength: float = 1.0, depth: float = 1.0) -> Grid:
    return Grid(dim=dim, n1=n1, fov=fov, wavelength=wavelength, depth=depth)
