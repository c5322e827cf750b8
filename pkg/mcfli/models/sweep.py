from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import relationship

from mcfli.database import Base


def _utcnow():
    return datetime.now(timezone.utc)


class SweepRun(Base):
    __tablename__ = "sweep_runs"

    id = Column(Integer, primary_key=True, index=True)
    created_at = Column(DateTime(timezone=True), default=_utcnow)
    master_seed = Column(String, index=True)
    solver = Column(String)
    spec_json = Column(Text)
    csv_path = Column(String, nullable=True)

    cells = relationship("SweepCellRecord", back_populates="run", cascade="all, delete-orphan")


class SweepCellRecord(Base):
    __tablename__ = "sweep_cells"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("sweep_runs.id"))
    K = Column(Integer)
    Q = Column(Integer)
    M = Column(Integer)
    visibility_target = Column(Float, nullable=True)
    trials = Column(Integer)
    success_rate = Column(Float)
    mean_visibilities = Column(Float)
    std_visibilities = Column(Float)
    mean_snr_db = Column(Float)
    mean_iterations = Column(Float)

    run = relationship("SweepRun", back_populates="cells")
