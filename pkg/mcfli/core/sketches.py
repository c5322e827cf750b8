from dataclasses import dataclass
from typing import Optional

import numpy as np

from mcfli.exceptions import DimensionError
from mcfli.schemas.core import SketchBatchSchema


@dataclass(frozen=True, eq=False)
class SketchBatch:
    """M sketching vectors of length Q, one per row of ``vectors``."""

    vectors: np.ndarray
    distribution: str = "uniform-phase"
    quant_bits: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionError(f"sketch vectors must have shape (M, Q), got {np.shape(self.vectors)}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    @property
    def Q(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, item) -> "SketchBatch":
        return SketchBatch(self.vectors[item], self.distribution, self.quant_bits, self.seed)

    def to_schema(self) -> SketchBatchSchema:
        pairs = np.stack([self.vectors.real, self.vectors.imag], axis=-1)
        return SketchBatchSchema(vectors=pairs.tolist(), distribution=self.distribution,
                                 quant_bits=self.quant_bits, seed=self.seed)

    @classmethod
    def from_schema(cls, schema: SketchBatchSchema) -> "SketchBatch":
        pairs = np.asarray(schema.vectors, dtype=float)
        return cls(pairs[..., 0] + 1j * pairs[..., 1], schema.distribution, schema.quant_bits, schema.seed)


def draw_sketches(Q: int, M: int, seed, quant_bits: Optional[int] = None) -> SketchBatch:
    """Unit-modulus sketches with i.i.d. uniform phases, optionally on a 2**quant_bits lattice."""
    if Q < 1 or M < 1:
        raise DimensionError(f"need Q >= 1 and M >= 1, got Q={Q}, M={M}")
    rng = np.random.default_rng(seed)
    if quant_bits is None:
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(M, Q))
    else:
        if quant_bits < 1:
            raise DimensionError(f"quant_bits must be >= 1, got {quant_bits}")
        levels = 2 ** quant_bits
        phases = rng.integers(0, levels, size=(M, Q)) * (2.0 * np.pi / levels)
    return SketchBatch(np.exp(1j * phases), "uniform-phase", quant_bits,
                       seed if isinstance(seed, (int, np.integer)) else None)
