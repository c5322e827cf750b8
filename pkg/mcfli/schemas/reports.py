from pydantic import BaseModel
from typing import Dict, List, Optional


class TrialReportSchema(BaseModel):
    K: int
    Q: int
    M: int
    seed: int
    snr_db: float
    success: bool
    num_visibilities: int
    iterations: int


class RipReportSchema(BaseModel):
    K0: int
    Q: int
    M: int
    trials: int
    num_visibilities: int
    lower: float
    upper: float
    envelope: float
    lower_ratio: float
    upper_ratio: float
    isometry_low: float
    isometry_high: float


class DemoReportSchema(BaseModel):
    Q: int
    M: int
    n1: int
    solver: str
    rho: Optional[float] = None
    snr_db: float
    rs_snr_db: float
    iterations: int
    converged: bool
    rho_sweep: Dict[str, float] = {}
    files: List[str] = []
