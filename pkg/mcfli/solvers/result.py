from dataclasses import dataclass, field
from pathlib import Path
import logging
from typing import Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from mcfli.core.hermitian import HermitianMatrix
from mcfli.exceptions import ConfigError
from mcfli.schemas.solver import RecoveryResultSchema, SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class RecoveryResult:
    estimate: Union[np.ndarray, HermitianMatrix]
    iterations: int
    residual: float
    converged: bool
    solver: str
    objective_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    residual_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    # objective_trace is nonincreasing from this index on
    safeguard_window: int = 0

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "iteration": np.arange(len(self.objective_trace)),
            "objective": self.objective_trace,
            "residual": self.residual_trace,
        })

    def write_traces(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.trace_frame().to_csv(path, index=False, float_format="%.10g")
        logger.info("Wrote %s traces to %s", self.solver, path)
        return path

    def to_schema(self) -> RecoveryResultSchema:
        data = np.asarray(self.estimate.data if isinstance(self.estimate, HermitianMatrix) else self.estimate)
        complex_valued = bool(np.iscomplexobj(data))
        flat = np.stack([data.real, data.imag], axis=-1).ravel() if complex_valued else data.ravel()
        return RecoveryResultSchema(
            solver=self.solver,
            estimate=flat.tolist(),
            shape=list(data.shape),
            complex_valued=complex_valued,
            iterations=self.iterations,
            residual=self.residual,
            converged=self.converged,
            objective_trace=list(map(float, self.objective_trace)),
            residual_trace=list(map(float, self.residual_trace)),
            safeguard_window=self.safeguard_window,
        )


def resolve_config(config: Optional[SolverConfig], required: str, **parameters) -> tuple[SolverConfig, float]:
    """Merge explicit program parameters into ``config`` and return the one ``required`` parameter."""
    base = config if config is not None else SolverConfig()
    updates = {k: v for k, v in parameters.items() if v is not None}
    try:
        merged = SolverConfig(**{**base.model_dump(), **updates})
    except ValidationError as exc:
        raise ConfigError(f"invalid solver configuration: {exc}") from exc
    value = getattr(merged, required)
    if value is None:
        raise ConfigError(f"this program needs {required} to be set")
    return merged, float(value)


def best_so_far(values, start: int, admissible=None) -> tuple[np.ndarray, int]:
    """
    Running minimum of an objective trace from ``start`` on.

    Entries before the window keep their raw values. With ``admissible`` the
    window opens at the first admissible entry at or after ``start`` and only
    admissible entries can lower the minimum.

    Returns:
        tuple: the monitored trace and the index where its nonincreasing part begins
    """
    trace = np.asarray(values, dtype=float).copy()
    ok = np.ones(trace.size, dtype=bool) if admissible is None else np.asarray(admissible, dtype=bool)
    candidates = np.flatnonzero(ok[start:])
    if candidates.size == 0:
        return trace, trace.size
    window = start + int(candidates[0])
    best = np.inf
    for i in range(window, trace.size):
        if ok[i]:
            best = min(best, trace[i])
        trace[i] = best
    return trace, window
