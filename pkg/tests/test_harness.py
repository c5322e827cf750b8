from contextlib import contextmanager
import json

import numpy as np
import pandas as pd
import pytest

import mcfli.main as cli
from mcfli.core.grid import make_grid
from mcfli.core.layout import fermat_spiral_layout, random_layout_1d, subsample_layout
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import ConfigError
from mcfli.harness.calibrate import run_calibration
from mcfli.harness.demo import imaging_snr_curve, run_imaging_demo
from mcfli.harness.ledger import list_runs
from mcfli.harness.rip import estimate_rip_constants, exhaustive_two_sparse, l1_ratio, random_sparse_unit
from mcfli.harness.sweep import CSV_COLUMNS, mean_visibilities, run_sweep, select_cores, transition_midpoint
from mcfli.harness.trial import run_trial
from mcfli.schemas.solver import SolverConfig
from mcfli.schemas.sweep import SweepSpec
from mcfli.sensing.combined import CombinedOperator

pytestmark = pytest.mark.harness


def _small_spec(**overrides):
    data = dict(K_values=[2], Q_values=[12], M_values=[8, 40], trials=3, master_seed=99,
                solver_config=SolverConfig(max_iterations=2000))
    data.update(overrides)
    return SweepSpec(**data)

def test_trial_is_reproducible():
    """Test that a trial depends only on its seed"""
    first = run_trial(2, 16, 50, seed=123)
    second = run_trial(2, 16, 50, seed=123)
    assert first == second
    assert first.num_visibilities <= 16 * 15

def test_empty_scene_trial_succeeds():
    """Test that K=0 recovers the zero image exactly"""
    trial = run_trial(0, 8, 10, seed=1)
    assert trial.snr_db == 300.0 and trial.success

def test_trial_rejects_unknown_solver():
    """Test solver validation"""
    with pytest.raises(ConfigError):
        run_trial(2, 8, 10, seed=1, solver="omp")

def test_sweep_spec_validation():
    """Test sweep axis checks"""
    with pytest.raises(ValueError):
        SweepSpec(K_values=[2], M_values=[10], Q_values=[8], visibility_targets=[100.0])
    with pytest.raises(ValueError):
        SweepSpec(K_values=[2], M_values=[10])
    with pytest.raises(ValueError):
        SweepSpec(K_values=[], M_values=[10], Q_values=[8])
    with pytest.raises(ValueError):
        SweepSpec(K_values=[2], M_values=[10], Q_values=[1])
    with pytest.raises(ValueError):
        SweepSpec(K_values=[2], M_values=[10], Q_values=[8], trials=0)

def test_sweep_cells_and_csv(tmp_path):
    """Test cell aggregation and the CSV layout"""
    spec = _small_spec(output_path=str(tmp_path / "sweep.csv"))
    result = run_sweep(spec)
    assert len(result.cells) == 2
    for cell in result.cells:
        assert 0.0 <= cell.success_rate <= 1.0
        assert cell.mean_visibilities <= 12 * 11
        assert cell.trials == 3
    frame = pd.read_csv(tmp_path / "sweep.csv")
    assert list(frame.columns) == CSV_COLUMNS
    assert frame["M"].tolist() == [8, 40]

def test_sweep_does_not_depend_on_threads():
    """Test that worker threads leave the results unchanged"""
    spec = _small_spec()
    serial = run_sweep(spec, threads=1).frame()
    threaded = run_sweep(spec, threads=3).frame()
    pd.testing.assert_frame_equal(serial, threaded)

def test_streamed_csv_matches_batch_export(tmp_path):
    """Test that rows streamed during a threaded sweep equal the full-table export byte for byte"""
    streamed = tmp_path / "streamed.csv"
    result = run_sweep(_small_spec(output_path=str(streamed), M_values=[8, 20, 40]), threads=3)
    batch = result.write_csv(tmp_path / "batch.csv")
    assert streamed.read_bytes() == batch.read_bytes()
    serial = tmp_path / "serial.csv"
    run_sweep(_small_spec(output_path=str(serial), M_values=[8, 20, 40]), threads=1)
    assert serial.read_bytes() == streamed.read_bytes()

def test_sweep_rejects_two_dimensional_grids():
    """Test that phase-transition sweeps are 1-D"""
    with pytest.raises(ConfigError):
        run_sweep(_small_spec(dim=2, n1=16))
    with pytest.raises(ConfigError):
        run_sweep(_small_spec(Q_values=[300]))

def test_sweep_is_recorded(db):
    """Test that a sweep with a session lands in the ledger"""
    run_sweep(_small_spec(), db=db)
    runs = list_runs(db)
    assert len(runs) == 1
    assert runs[0].master_seed == "99"
    assert [cell.M for cell in runs[0].cells] == [8, 40]

def test_select_cores_reaches_target():
    """Test the |V0| target search"""
    grid = make_grid(1, 256, 1.0)
    Q = select_cores(grid, 100.0, master_seed=5, pilots=8)
    assert abs(mean_visibilities(grid, Q, 5, 8) - 100.0) <= 0.2 * 100.0
    assert mean_visibilities(grid, Q - 1, 5, 8) < 100.0 * 1.02

def test_visibility_spread_is_small():
    """Test std(|V0|) <= 0.08 N over random layouts"""
    grid = make_grid(1, 256, 1.0)
    counts = [random_layout_1d(grid, 16, seed=s).num_visibilities for s in range(80)]
    assert max(counts) <= 16 * 15
    assert np.std(counts) <= 0.08 * grid.N

def test_sweep_with_visibility_targets():
    """Test that targets are converted to core counts"""
    spec = SweepSpec(K_values=[1], M_values=[10], visibility_targets=[60.0], trials=2, pilot_layouts=4)
    result = run_sweep(spec)
    assert result.cells[0].visibility_target == 60.0
    assert result.cells[0].Q >= 2

def test_transition_midpoint():
    """Test the 50 % crossing"""
    assert transition_midpoint([10, 20, 30], [0.0, 0.4, 0.8]) == pytest.approx(22.5)
    assert transition_midpoint([10, 20], [0.6, 1.0]) == 10.0
    assert transition_midpoint([10, 20], [0.0, 0.1]) is None

@pytest.mark.slow
def test_phase_transition_in_M():
    """Test low success at M = 4K and high success at M >= 11K + 10 for K=2"""
    spec = SweepSpec(K_values=[2], Q_values=[24], M_values=[8, 32], trials=20, master_seed=2024)
    low, high = run_sweep(spec, threads=2).cells
    assert low.success_rate <= 0.1
    assert high.success_rate >= 0.95

TRANSITION_M = [8, 16, 22, 32, 44, 54, 66, 88, 98, 120]

@pytest.fixture(scope="module")
def transition_sweep():
    spec = SweepSpec(K_values=[2, 4, 8], visibility_targets=[240.0], M_values=TRANSITION_M,
                     trials=80, master_seed=2024)
    return run_sweep(spec, threads=4)

def _rates(sweep, K):
    cells = [cell for cell in sweep.cells if cell.K == K]
    return [cell.M for cell in cells], [cell.success_rate for cell in cells]

@pytest.mark.slow
@pytest.mark.parametrize("K", [2, 4, 8])
def test_transition_follows_eleven_measurements_per_spike(transition_sweep, K):
    """Test the |V0| = 240 transition: <= 10 % below 4K, >= 95 % above 11K + 10, midpoint 11K +- 30 %"""
    Ms, rates = _rates(transition_sweep, K)
    for M, rate in zip(Ms, rates):
        if M <= 4 * K:
            assert rate <= 0.1, f"M={M}"
        if M >= 11 * K + 10:
            assert rate >= 0.95, f"M={M}"
    midpoint = transition_midpoint(Ms, rates)
    assert midpoint is not None
    assert 0.7 * 11 * K <= midpoint <= 1.3 * 11 * K

@pytest.mark.slow
def test_success_rate_nondecreasing_in_M(transition_sweep):
    """Test success monotonicity in M within two binomial standard deviations"""
    for K in (2, 4, 8):
        _, rates = _rates(transition_sweep, K)
        for before, after in zip(rates, rates[1:]):
            sigma = np.sqrt((before * (1 - before) + after * (1 - after)) / 80)
            assert after >= before - 2 * sigma

@pytest.mark.slow
def test_transition_in_visibilities_at_fixed_M():
    """Test that at M=122 and K=4 success sets in near |V0| = 10K (+- 30 %) for small Q"""
    spec = SweepSpec(K_values=[4], Q_values=[3, 4, 5, 6, 7, 8, 9, 10, 12], M_values=[122],
                     trials=40, master_seed=7)
    cells = run_sweep(spec, threads=4).cells
    visibilities = [cell.mean_visibilities for cell in cells]
    rates = [cell.success_rate for cell in cells]
    midpoint = transition_midpoint(visibilities, rates)
    assert midpoint is not None
    assert 0.7 * 40 <= midpoint <= 1.3 * 40

def test_rip_estimate():
    """Test positive lower constant and the upper constant against 8/3 of the envelope"""
    estimate = estimate_rip_constants(K0=2, Q=16, M=100, trials=100, seed=3)
    assert 0 < estimate.lower <= estimate.upper
    assert estimate.upper_ratio <= 8 / 3 * 1.2
    assert estimate.isometry_low <= estimate.isometry_high
    assert estimate.to_schema().num_visibilities == estimate.num_visibilities

def test_rip_preconditions():
    """Test the trial and sparsity minimums"""
    with pytest.raises(ConfigError):
        estimate_rip_constants(K0=2, Q=8, M=20, trials=10, seed=0)
    with pytest.raises(ConfigError):
        estimate_rip_constants(K0=1, Q=8, M=20, trials=100, seed=0)

def test_exhaustive_two_sparse_bounds_random_draws():
    """Test that random 2-sparse ratios fall inside the exhaustive extremes"""
    grid = make_grid(1, 16, 1.0)
    operator = CombinedOperator(random_layout_1d(grid, 4, seed=1), draw_sketches(4, 20, seed=2))
    lo, hi = exhaustive_two_sparse(operator)
    rng = np.random.default_rng(0)
    for _ in range(20):
        ratio = l1_ratio(operator, random_sparse_unit(grid.N, 2, rng))
        assert lo - 1e-12 <= ratio <= hi + 1e-12

def test_small_imaging_demo_writes_outputs(tmp_path):
    """Test the demo artifacts on a small grid"""
    layout = fermat_spiral_layout(make_grid(2, 16, 1.0), 20)
    report = run_imaging_demo(layout=layout, M=200, rho=1e-4, config=SolverConfig(max_iterations=50),
                              out=tmp_path)
    assert report.estimate.shape == (16, 16)
    assert report.estimate.min() >= 0
    for name in ("truth.pgm", "estimate.pgm", "raster_scan.pgm", "estimate.mcfa", "traces.csv", "report.json"):
        assert (tmp_path / name).exists()
    saved = json.loads((tmp_path / "report.json").read_text())
    assert saved["Q"] == 20 and saved["M"] == 200

@pytest.mark.slow
def test_imaging_demo_quality_and_core_density():
    """Test >= 20 dB for Q=110, M=3000 and that Q=110 beats its Q=55 subset"""
    dense = fermat_spiral_layout(make_grid(2, 64, 1.0), 110)
    curve = imaging_snr_curve({"dense": dense, "sparse": subsample_layout(dense, 2)}, [3000])
    snrs = dict(zip(curve["layout"], curve["snr_db"]))
    assert snrs["dense"] >= 20.0
    assert snrs["dense"] >= snrs["sparse"]

def test_calibration_round_trip(tmp_path):
    """Test speckle prediction from recovered fields, noiseless and at 1 % noise"""
    clean = run_calibration(out=tmp_path)
    assert clean.frames_rendered == 8 * 110 + 1
    assert clean.min_cross_correlation >= 0.999
    assert len(clean.cross_correlations) == 20
    assert (tmp_path / "fringes" / "manifest.json").exists()
    noisy = run_calibration(noise_sigma=0.01, seed=1)
    assert noisy.min_cross_correlation >= 0.99

def test_cli_trial(capsys):
    """Test the trial subcommand"""
    assert cli.main(["trial", "--K", "2", "--Q", "12", "--M", "40", "--seed", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["K"] == 2 and report["seed"] == 3

def test_cli_reports_errors(capsys):
    """Test that library errors exit with status 2 and a message"""
    assert cli.main(["rip", "--K0", "2", "--Q", "8", "--M", "20", "--trials", "10"]) == 2
    assert "error:" in capsys.readouterr().err

def test_cli_rejects_bad_config(tmp_path, capsys):
    """Test that an invalid config file is a configuration error"""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"K_values": [2], "M_values": [10], "trials": 0, "Q_values": [8]}))
    assert cli.main(["sweep", "--config", str(path), "--no-db"]) == 2
    assert "invalid configuration" in capsys.readouterr().err

def test_cli_sweep_and_runs(tmp_path, db, monkeypatch, capsys):
    """Test sweep CSV output, ledger recording and listing"""
    @contextmanager
    def session():
        yield db

    monkeypatch.setattr(cli, "db_session", session)
    monkeypatch.setattr(cli.Base.metadata, "create_all", lambda bind=None: None)
    args = ["sweep", "--K", "2", "--Q", "8", "--M", "10", "20", "--trials", "2", "--seed", "7", "--out", str(tmp_path)]
    assert cli.main(args) == 0
    frame = pd.read_csv(tmp_path / "sweep.csv")
    assert len(frame) == 2
    capsys.readouterr()
    assert cli.main(["runs"]) == 0
    assert "seed=7" in capsys.readouterr().out

def test_cli_threads_only_on_sweep():
    """Test that --threads belongs to the sweep subcommand only"""
    parser = cli.build_parser()
    assert parser.parse_args(["sweep", "--threads", "3"]).threads == 3
    for command in ("demo", "calibrate", "trial"):
        with pytest.raises(SystemExit):
            parser.parse_args([command, "--threads", "3"])
