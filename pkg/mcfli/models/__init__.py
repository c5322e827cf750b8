from mcfli.models.sweep import SweepCellRecord, SweepRun

__all__ = ["SweepRun", "SweepCellRecord"]
