from pydantic import BaseModel, Field
from typing import List, Literal, Optional, Tuple

ComplexPair = Tuple[float, float]


class GridSchema(BaseModel):
    dim: Literal[1, 2]
    n1: int = Field(ge=2)
    fov: float = Field(gt=0)
    wavelength: float = Field(default=1.0, gt=0)
    depth: float = Field(default=1.0, gt=0)


class LayoutSchema(BaseModel):
    grid: GridSchema
    positions: List[List[float]]
    name: str = "custom"


class SketchBatchSchema(BaseModel):
    vectors: List[List[ComplexPair]]
    distribution: str = "uniform-phase"
    quant_bits: Optional[int] = None
    seed: Optional[int] = None


class SceneSchema(BaseModel):
    grid: GridSchema
    values: List[float]
    vignette: Optional[List[float]] = None
    sparsity: Optional[int] = None
    support: Optional[List[int]] = None
    zero_mean: bool = False


class NoiseSchema(BaseModel):
    model: Literal["none", "gaussian", "uniform"] = "none"
    level: float = Field(default=0.0, ge=0)
    epsilon: float = Field(default=0.0, ge=0)


class MeasurementRecordSchema(BaseModel):
    raw: List[float]
    debiased: List[float]
    noise: NoiseSchema
    mode: Literal["SROP", "RS", "SI", "generalized"] = "SROP"
    seed: Optional[int] = None
