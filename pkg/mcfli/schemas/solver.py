from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional

from mcfli.config import MAX_ITERATIONS, TOLERANCE


class SolverConfig(BaseModel):
    max_iterations: int = Field(default=MAX_ITERATIONS, gt=0)
    atol: float = Field(default=1e-12, gt=0)
    rtol: float = Field(default=TOLERANCE, gt=0)
    step_rule: Literal["power-iteration", "fixed"] = "power-iteration"
    step_size: Optional[float] = Field(default=None, gt=0)
    tau: Optional[float] = Field(default=None, ge=0)
    epsilon: Optional[float] = Field(default=None, ge=0)
    rho: Optional[float] = Field(default=None, gt=0)
    memory: int = Field(default=10, ge=1)
    power_iterations: int = Field(default=100, ge=1)
    seed: int = 0

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_parameters(self):
        given = [name for name in ("tau", "epsilon", "rho") if getattr(self, name) is not None]
        if len(given) > 1:
            raise ValueError(f"only one of tau, epsilon, rho may be set, got {', '.join(given)}")
        if self.step_rule == "fixed" and self.step_size is None:
            raise ValueError("step_rule 'fixed' needs step_size")
        return self


class RecoveryResultSchema(BaseModel):
    solver: str
    estimate: List[float] = Field(description="real estimates, or [re, im] interleaved for matrices")
    shape: List[int]
    complex_valued: bool = False
    iterations: int
    residual: float
    converged: bool
    objective_trace: List[float] = []
    residual_trace: List[float] = []
    safeguard_window: int = 0
