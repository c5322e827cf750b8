from mcfli.schemas.core import (
    GridSchema,
    LayoutSchema,
    MeasurementRecordSchema,
    NoiseSchema,
    SceneSchema,
    SketchBatchSchema,
)
from mcfli.schemas.solver import RecoveryResultSchema, SolverConfig
from mcfli.schemas.sweep import SweepCellSchema, SweepResultSchema, SweepRunSchema, SweepSpec
