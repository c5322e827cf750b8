from datetime import datetime
from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional

from mcfli.config import MASTER_SEED, SUCCESS_DB, TRIALS
from mcfli.schemas.solver import SolverConfig


class SweepSpec(BaseModel):
    dim: Literal[1, 2] = 1
    n1: int = Field(default=256, ge=2)
    fov: float = Field(default=1.0, gt=0)
    K_values: List[int]
    M_values: List[int]
    Q_values: Optional[List[int]] = None
    visibility_targets: Optional[List[float]] = None
    trials: int = Field(default=TRIALS, ge=1)
    threshold_db: float = Field(default=SUCCESS_DB, gt=0)
    master_seed: int = Field(default=MASTER_SEED, ge=0)
    solver: Literal["lasso", "bpdn"] = "lasso"
    solver_config: SolverConfig = Field(default_factory=SolverConfig)
    pilot_layouts: int = Field(default=16, ge=1)
    output_path: Optional[str] = None

    @model_validator(mode="after")
    def check_ranges(self):
        if not self.K_values or not self.M_values:
            raise ValueError("K_values and M_values must be nonempty")
        if (self.Q_values is None) == (self.visibility_targets is None):
            raise ValueError("set exactly one of Q_values and visibility_targets")
        if self.Q_values is not None and (not self.Q_values or min(self.Q_values) < 2):
            raise ValueError("Q_values must be nonempty with every Q >= 2")
        if self.visibility_targets is not None and (
            not self.visibility_targets or min(self.visibility_targets) <= 0
        ):
            raise ValueError("visibility_targets must be nonempty and positive")
        if min(self.K_values) < 0 or min(self.M_values) < 1:
            raise ValueError("K must be >= 0 and M >= 1")
        return self


class SweepCellSchema(BaseModel):
    K: int
    Q: int
    M: int
    visibility_target: Optional[float] = None
    trials: int
    success_rate: float = Field(ge=0, le=1)
    mean_visibilities: float
    std_visibilities: float
    mean_snr_db: float
    mean_iterations: float

    class Config:
        from_attributes = True


class SweepResultSchema(BaseModel):
    spec: SweepSpec
    cells: List[SweepCellSchema]


class SweepRunSchema(BaseModel):
    id: int
    created_at: datetime
    master_seed: str
    solver: str
    csv_path: Optional[str] = None
    cells: List[SweepCellSchema] = []

    class Config:
        from_attributes = True
