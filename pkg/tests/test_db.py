import pytest
from sqlalchemy.orm import Session
from sqlalchemy import text
from mcfli.models.sweep import SweepCellRecord, SweepRun
from mcfli.harness.ledger import delete_run, list_runs

pytestmark = pytest.mark.db

def _run(seed="1", cells=2):
    run = SweepRun(master_seed=seed, solver="lasso", spec_json="{}")
    for M in range(cells):
        run.cells.append(SweepCellRecord(
            K=2, Q=12, M=10 * (M + 1), trials=4, success_rate=0.5,
            mean_visibilities=100.0, std_visibilities=3.0, mean_snr_db=20.0, mean_iterations=50.0,
        ))
    return run

def test_database_connection(db: Session):
    """Test basic database connection"""
    # Try to execute a simple query
    result = db.execute(text("SELECT 1"))
    assert result.scalar() == 1

def test_cascade_delete(db: Session):
    """Test that cells are deleted when their run is deleted"""
    # Create a run with cells
    run = _run()
    db.add(run)
    db.commit()
    run_id = run.id

    # Delete the run
    assert delete_run(db, run_id)

    # Verify cells were also deleted
    saved = db.query(SweepCellRecord).filter(SweepCellRecord.run_id == run_id).first()
    assert saved is None
    assert not delete_run(db, run_id)

def test_list_runs_newest_first(db: Session):
    """Test run listing order and limit"""
    for seed in ("1", "2", "3"):
        db.add(_run(seed))
        db.commit()
    runs = list_runs(db, limit=2)
    assert [run.master_seed for run in runs] == ["3", "2"]
    assert len(runs[0].cells) == 2
    assert runs[0].created_at is not None
