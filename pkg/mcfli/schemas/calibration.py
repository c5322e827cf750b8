from pydantic import BaseModel
from typing import List

from mcfli.schemas.core import GridSchema


class FringeFrameSchema(BaseModel):
    core: int
    step: int
    phase: float
    file: str


class FringeManifestSchema(BaseModel):
    grid: GridSchema
    num_cores: int
    reference_core: int
    steps: int = 8
    noise_level: float = 0.0
    dtype: str = "float64-le"
    reference_file: str
    frames: List[FringeFrameSchema]


class CalibrationReportSchema(BaseModel):
    num_cores: int
    frames_rendered: int
    noise_sigma: float
    masked_fraction: float
    cross_correlations: List[float]
    min_cross_correlation: float
