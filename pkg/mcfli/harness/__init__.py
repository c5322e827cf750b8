from mcfli.harness.trial import TrialResult, run_trial
from mcfli.harness.sweep import SweepCell, SweepResult, run_sweep, select_cores, transition_midpoint
from mcfli.harness.rip import RipEstimate, estimate_rip_constants, exhaustive_two_sparse
from mcfli.harness.demo import DemoReport, imaging_snr_curve, run_imaging_demo
from mcfli.harness.calibrate import run_calibration
from mcfli.harness.ledger import list_runs, record_sweep

__all__ = [
    "TrialResult", "run_trial",
    "SweepCell", "SweepResult", "run_sweep", "select_cores", "transition_midpoint",
    "RipEstimate", "estimate_rip_constants", "exhaustive_two_sparse",
    "DemoReport", "run_imaging_demo", "imaging_snr_curve",
    "run_calibration",
    "record_sweep", "list_runs",
]
