import logging
from typing import List, Optional

from sqlalchemy.orm import Session

from mcfli.models.sweep import SweepCellRecord, SweepRun
from mcfli.schemas.sweep import SweepRunSchema

logger = logging.getLogger(__name__)


def record_sweep(db: Session, result, csv_path: Optional[str] = None) -> SweepRun:
    """Store a finished sweep and its cells."""
    run = SweepRun(
        master_seed=str(result.spec.master_seed),
        solver=result.spec.solver,
        spec_json=result.spec.model_dump_json(),
        csv_path=csv_path,
    )
    for cell in result.cells:
        run.cells.append(SweepCellRecord(**cell.to_schema().model_dump()))
    db.add(run)
    db.commit()
    db.refresh(run)
    logger.info("Recorded sweep run %d with %d cells", run.id, len(run.cells))
    return run


def list_runs(db: Session, limit: int = 20) -> List[SweepRunSchema]:
    runs = db.query(SweepRun).order_by(SweepRun.id.desc()).limit(limit).all()
    return [SweepRunSchema.model_validate(run) for run in runs]


def delete_run(db: Session, run_id: int) -> bool:
    run = db.query(SweepRun).filter(SweepRun.id == run_id).first()
    if run is None:
        return False
    db.delete(run)
    db.commit()
    return True
