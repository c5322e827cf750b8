from dataclasses import dataclass
from typing import Optional

import numpy as np

from mcfli.exceptions import DimensionError
from mcfli.schemas.core import MeasurementRecordSchema, NoiseSchema

MODES = ("SROP", "RS", "SI", "generalized")


@dataclass(frozen=True)
class NoiseDescriptor:
    model: str = "none"
    level: float = 0.0
    epsilon: float = 0.0


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    raw: np.ndarray
    debiased: np.ndarray
    noise: NoiseDescriptor = NoiseDescriptor()
    mode: str = "SROP"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DimensionError(f"unknown measurement mode {self.mode!r}")
        raw = np.asarray(self.raw, dtype=float)
        debiased = np.asarray(self.debiased, dtype=float)
        if raw.ndim != 1 or raw.shape != debiased.shape:
            raise DimensionError("raw and debiased measurements must be vectors of equal length")
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "debiased", debiased)

    @property
    def M(self) -> int:
        return self.raw.size

    def to_schema(self) -> MeasurementRecordSchema:
        return MeasurementRecordSchema(
            raw=self.raw.tolist(),
            debiased=self.debiased.tolist(),
            noise=NoiseSchema(model=self.noise.model, level=self.noise.level, epsilon=self.noise.epsilon),
            mode=self.mode,
            seed=self.seed,
        )

    @classmethod
    def from_schema(cls, schema: MeasurementRecordSchema) -> "MeasurementRecord":
        noise = NoiseDescriptor(schema.noise.model, schema.noise.level, schema.noise.epsilon)
        return cls(np.asarray(schema.raw), np.asarray(schema.debiased), noise, schema.mode, schema.seed)
