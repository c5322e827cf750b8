import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from mcfli.core.grid import make_grid
from mcfli.core.hermitian import HermitianMatrix, random_hermitian
from mcfli.core.layout import fermat_spiral_layout, random_layout_1d
from mcfli.core.scene import sparse_scene, spike_scene
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import ConfigError, DimensionError, MeasurementCountError
from mcfli.schemas.solver import SolverConfig
from mcfli.sensing.combined import CombinedOperator
from mcfli.sensing.interferometric import interferometric_matrix
from mcfli.sensing.srop import SropOperator, debias, srop_forward
from mcfli.solvers.lasso import solve_lasso
from mcfli.solvers.metrics import snr, vignetted_snr
from mcfli.solvers.nyquist import nyquist_count, nyquist_recover, nyquist_sketches
from mcfli.solvers.primal_dual import solve_bpdn_l1, solve_trace_min_psd, solve_tv_nonneg
from mcfli.solvers.projections import (
    project_centered_l1_ball,
    project_l1_ball,
    project_l1_ball_bisection,
    project_psd,
    soft_threshold,
)
from mcfli.solvers.result import RecoveryResult, best_so_far, resolve_config
from mcfli.solvers.tv import divergence, gradient, total_variation

pytestmark = pytest.mark.solvers


def _sparse_instance(K, Q, M, seed, N=256):
    grid = make_grid(1, N, 1.0)
    layout = random_layout_1d(grid, Q, seed=seed)
    operator = CombinedOperator(layout, draw_sketches(Q, M, seed=seed + 1000))
    scene = sparse_scene(grid, K, seed=seed + 2000)
    return operator, scene.vector, operator.forward(scene.vector)

def _rank_one(Q, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(Q) + 1j * rng.standard_normal(Q)
    return HermitianMatrix(np.outer(v, v.conj()))

def _assert_nonincreasing_after_window(result):
    trace = result.objective_trace
    assert np.all(np.diff(trace[result.safeguard_window:]) <= 0)

def test_soft_threshold():
    """Test shrinkage toward zero"""
    np.testing.assert_allclose(soft_threshold([-3.0, -0.5, 0.2, 2.0], 1.0), [-2.0, 0.0, 0.0, 1.0])

def test_l1_projection_matches_bisection(rng):
    """Test the sort-based projection against the bisection reference"""
    for _ in range(20):
        v = rng.standard_normal(int(rng.integers(2, 200))) * rng.uniform(0.1, 10.0)
        radius = float(rng.uniform(0.05, 0.9)) * np.abs(v).sum()
        fast = project_l1_ball(v, radius)
        assert np.abs(fast).sum() == pytest.approx(radius, rel=1e-12)
        np.testing.assert_allclose(fast, project_l1_ball_bisection(v, radius), atol=1e-12)

def test_l1_projection_edge_cases():
    """Test inside points, zero radius and negative radius"""
    v = np.array([0.1, -0.2, 0.3])
    np.testing.assert_array_equal(project_l1_ball(v, 1.0), v)
    np.testing.assert_array_equal(project_l1_ball(v, 0.0), np.zeros(3))
    with pytest.raises(ValueError):
        project_l1_ball(v, -1.0)
    with pytest.raises(DimensionError):
        project_l1_ball(np.ones((2, 2)), 1.0)

def test_l1_projection_with_ties():
    """Test a deterministic answer when entries tie"""
    np.testing.assert_allclose(project_l1_ball(np.array([1.0, 1.0, -1.0]), 1.5), [0.5, 0.5, -0.5])

def test_centered_l1_projection():
    """Test projection onto a shifted ball"""
    center = np.array([1.0, 1.0])
    w = project_centered_l1_ball(np.array([3.0, 1.0]), center, 1.0)
    np.testing.assert_allclose(w, [2.0, 1.0])

def test_psd_projection(rng):
    """Test eigenvalue clipping"""
    H = random_hermitian(6, rng).data
    P = project_psd(H)
    assert np.linalg.eigvalsh(P).min() >= -1e-12
    np.testing.assert_allclose(project_psd(P), P, atol=1e-12)
    A = _rank_one(6, 1).data
    np.testing.assert_allclose(project_psd(A), A, atol=1e-10)

def test_gradient_divergence_adjoint(rng):
    """Test <grad u, p> = -<u, div p>"""
    u = rng.standard_normal((7, 9))
    p = rng.standard_normal((2, 7, 9))
    assert np.sum(gradient(u) * p) == pytest.approx(-np.sum(u * divergence(p)), rel=1e-12)

def test_total_variation():
    """Test TV of constant and step images"""
    assert total_variation(np.ones((5, 5))) == 0.0
    step = np.zeros((4, 6))
    step[:, 3:] = 2.0
    assert total_variation(step) == pytest.approx(8.0)

def test_snr_values(rng):
    """Test the SNR formula, its cap and its zero-truth error"""
    f = rng.standard_normal(50)
    u = rng.standard_normal(50)
    u /= np.linalg.norm(u)
    assert snr(np.zeros(50), f) == pytest.approx(0.0)
    assert snr(f + 0.01 * np.linalg.norm(f) * u, f) == pytest.approx(40.0)
    assert snr(f, f) == 300.0
    with pytest.raises(DimensionError):
        snr(np.ones(50), np.zeros(50))
    with pytest.raises(DimensionError):
        snr(np.ones(3), np.ones(4))

def test_vignetted_snr(rng):
    """Test that only the vignetted error counts"""
    f = rng.uniform(0.5, 1.0, 40)
    w = np.ones(40)
    w[20:] = 0.0
    estimate = f.copy()
    estimate[20:] = 0.0
    assert vignetted_snr(estimate, f, w) == 300.0
    assert vignetted_snr(np.zeros(40), f, w) == pytest.approx(0.0)
    with pytest.raises(DimensionError):
        vignetted_snr(f, f, np.zeros(40))

def test_solver_config_validation():
    """Test that at most one program parameter is set and fixed steps need a size"""
    with pytest.raises(ValidationError):
        SolverConfig(tau=1.0, epsilon=0.1)
    with pytest.raises(ValidationError):
        SolverConfig(step_rule="fixed")
    with pytest.raises(ValidationError):
        SolverConfig(rtol=0.0)
    assert SolverConfig(step_rule="fixed", step_size=0.5).step_size == 0.5

def test_resolve_config():
    """Test merging of explicit parameters into a config"""
    cfg, tau = resolve_config(SolverConfig(max_iterations=10), "tau", tau=2.0)
    assert tau == 2.0 and cfg.max_iterations == 10
    with pytest.raises(ConfigError):
        resolve_config(SolverConfig(epsilon=0.1), "tau", tau=1.0)
    with pytest.raises(ConfigError):
        resolve_config(None, "rho")

def test_recovery_result_traces(tmp_path):
    """Test the per-iteration trace export"""
    result = RecoveryResult(np.zeros(3), 2, 0.5, True, "lasso", np.array([3.0, 2.0, 1.0]), np.array([1.0, 0.7, 0.5]))
    frame = pd.read_csv(result.write_traces(tmp_path / "traces.csv"))
    assert list(frame.columns) == ["iteration", "objective", "residual"]
    assert frame["objective"].tolist() == [3.0, 2.0, 1.0]
    assert result.to_schema().shape == [3]

def test_best_so_far_trace():
    """Test the running minimum past the window, with and without admissibility"""
    trace, window = best_so_far([5.0, 1.0, 4.0, 3.0, 6.0, 2.0], 2)
    assert window == 2
    assert trace.tolist() == [5.0, 1.0, 4.0, 3.0, 3.0, 2.0]
    trace, window = best_so_far([0.0, 1.0, 4.0, 3.0, 6.0], 1, [True, False, True, False, True])
    assert window == 2
    assert trace.tolist() == [0.0, 1.0, 4.0, 4.0, 4.0]
    trace, window = best_so_far([1.0, 2.0], 0, [False, False])
    assert window == 2 and trace.tolist() == [1.0, 2.0]

def test_lasso_recovers_two_sparse_scenes():
    """Test noiseless Lasso recovery for N=256, K=2, Q=24, M=60 with tau = ||f||_1"""
    successes = 0
    for seed in range(5):
        operator, f, y = _sparse_instance(2, 24, 60, seed)
        tau = float(np.abs(f).sum())
        result = solve_lasso(operator, y, tau=tau)
        assert np.abs(result.estimate).sum() <= tau * (1 + 1e-9)
        successes += snr(result.estimate, f) >= 40.0
    assert successes >= 4

def test_lasso_zero_radius_returns_zero():
    """Test tau = 0"""
    operator, _, y = _sparse_instance(2, 8, 20, 0)
    result = solve_lasso(operator, y, tau=0.0)
    assert not np.any(result.estimate)
    assert result.converged
    assert result.residual == pytest.approx(np.linalg.norm(y))

def test_lasso_objective_decreases():
    """Test a decreasing objective trace past the line-search window and aligned traces"""
    operator, f, y = _sparse_instance(3, 16, 40, 7)
    result = solve_lasso(operator, y, tau=float(np.abs(f).sum()), config=SolverConfig(max_iterations=200))
    assert result.objective_trace[-1] <= result.objective_trace[0]
    _assert_nonincreasing_after_window(result)
    assert len(result.objective_trace) == len(result.residual_trace)
    assert result.iterations <= 200

def test_lasso_requires_tau():
    """Test that a missing radius raises ConfigError"""
    operator, _, y = _sparse_instance(2, 8, 20, 0)
    with pytest.raises(ConfigError):
        solve_lasso(operator, y)
    with pytest.raises(DimensionError):
        solve_lasso(operator, y[:-1], tau=1.0)

def test_bpdn_recovers_two_sparse_scene():
    """Test noiseless l1-fidelity basis pursuit with epsilon = 0"""
    successes = 0
    for seed in range(3):
        operator, f, y = _sparse_instance(2, 24, 60, seed)
        result = solve_bpdn_l1(operator, y, epsilon=0.0)
        successes += snr(result.estimate, f) >= 40.0
    assert successes >= 2

def test_bpdn_respects_the_budget():
    """Test the returned iterate satisfies ||y - B x||_1 <= eps (1 + 1e-6) + 1e-9 on convergence"""
    operator, f, y = _sparse_instance(2, 24, 60, 3)
    epsilon = 0.05 * float(np.abs(y).sum())
    result = solve_bpdn_l1(operator, y, epsilon=epsilon, config=SolverConfig(rtol=1e-6))
    assert result.converged
    assert result.residual <= epsilon * (1 + 1e-6) + 1e-9 * max(1.0, float(np.abs(y).sum()))
    assert np.abs(result.estimate).sum() <= np.abs(f).sum() * (1 + 1e-6)
    _assert_nonincreasing_after_window(result)
    assert result.safeguard_window < len(result.objective_trace)

@pytest.mark.slow
def test_lasso_and_bpdn_agree():
    """Test that Lasso with tau = ||f||_1 and BPDN with eps = 0 give the same estimate on noiseless data"""
    for seed in range(20):
        operator, f, y = _sparse_instance(2, 24, 60, seed)
        lasso = solve_lasso(operator, y, tau=float(np.abs(f).sum()))
        bpdn = solve_bpdn_l1(operator, y, epsilon=0.0)
        gap = np.linalg.norm(lasso.estimate - bpdn.estimate) / np.linalg.norm(bpdn.estimate)
        assert gap <= 1e-4, f"seed {seed}: relative difference {gap:.2e}"

def test_bpdn_inside_budget_returns_zero():
    """Test that y inside the ball gives the zero image"""
    operator, _, y = _sparse_instance(2, 8, 20, 0)
    result = solve_bpdn_l1(operator, y, epsilon=float(np.abs(y).sum()) + 1.0)
    assert not np.any(result.estimate) and result.iterations == 0

@pytest.mark.slow
def test_bpdn_error_shrinks_with_the_noise_budget():
    """Test that halving a bounded noise and its budget reduces the error"""
    operator, f, y = _sparse_instance(2, 24, 80, 4)
    noise = debias(np.random.default_rng(9).uniform(-1.0, 1.0, y.size)) * 0.02 * np.abs(y).max()
    errors = []
    for scale in (1.0, 0.5):
        n = scale * noise
        result = solve_bpdn_l1(operator, y + n, epsilon=float(np.abs(n).sum()))
        errors.append(np.linalg.norm(result.estimate - f))
    assert errors[1] < errors[0]

@pytest.mark.slow
def test_trace_min_recovers_rank_one_matrix():
    """Test PSD trace minimization for Q=6 rank-one from M=24 noiseless SROPs"""
    truth = _rank_one(6, 3)
    sketches = draw_sketches(6, 24, seed=21)
    y = srop_forward(truth, sketches)
    result = solve_trace_min_psd(sketches, y, epsilon=0.0, config=SolverConfig(max_iterations=50000, rtol=1e-11))
    estimate = result.estimate
    assert isinstance(estimate, HermitianMatrix)
    eigenvalues = estimate.eigvalsh()
    assert eigenvalues.min() >= -1e-8 * eigenvalues.max()
    error = np.linalg.norm(estimate.data - truth.data) / truth.frobenius_norm
    assert error <= 1e-3
    _assert_nonincreasing_after_window(result)

def test_trace_min_fails_with_too_few_sketches():
    """Test that M=4 SROPs of a two-spike interferometric matrix with Q=8 leave a large error"""
    grid = make_grid(1, 256, 1.0)
    truth = interferometric_matrix(spike_scene(grid, 2, seed=4), random_layout_1d(grid, 8, seed=3))
    sketches = draw_sketches(8, 4, seed=21)
    result = solve_trace_min_psd(SropOperator(sketches), srop_forward(truth, sketches), epsilon=0.0,
                                 config=SolverConfig(max_iterations=5000))
    error = np.linalg.norm(result.estimate.data - truth.data) / truth.frobenius_norm
    assert error > 0.5

def test_trace_min_needs_uncentered_operator():
    """Test that centered SROPs are refused"""
    sketches = draw_sketches(4, 10, seed=1)
    with pytest.raises(DimensionError):
        solve_trace_min_psd(SropOperator(sketches, centered=True), np.zeros(10), epsilon=0.0)

def test_tv_solution_is_nonnegative():
    """Test the nonnegativity projection and the reported final objective"""
    grid = make_grid(2, 16, 1.0)
    layout = fermat_spiral_layout(grid, 20)
    operator = CombinedOperator(layout, draw_sketches(20, 150, seed=2))
    truth = np.zeros(grid.shape)
    truth[4:10, 5:12] = 1.0
    y = operator.forward(truth.ravel())
    result = solve_tv_nonneg(operator, y, rho=1e-6, config=SolverConfig(max_iterations=200))
    assert result.estimate.min() >= 0.0
    f = result.estimate
    expected = np.sum((y - operator.forward(f)) ** 2) / (2 * y.size) + 1e-6 * total_variation(f.reshape(grid.shape))
    assert result.residual == pytest.approx(expected, rel=1e-9)
    assert result.objective_trace[-1] < result.objective_trace[0]
    _assert_nonincreasing_after_window(result)

def _small_tv_problem():
    grid = make_grid(2, 8, 1.0)
    operator = CombinedOperator(fermat_spiral_layout(grid, 10), draw_sketches(10, 60, seed=3))
    truth = np.zeros(grid.shape)
    truth[2:5, 3:7] = 1.0
    return operator, operator.forward(truth.ravel())

def test_tv_zero_data_gives_zero_image():
    """Test that y_c = 0 returns the zero image"""
    operator, y = _small_tv_problem()
    result = solve_tv_nonneg(operator, np.zeros_like(y), rho=1e-3)
    assert not np.any(result.estimate)
    assert result.residual == 0.0

def test_tv_large_weight_gives_flat_image():
    """Test that a dominant TV weight leaves a constant image"""
    operator, y = _small_tv_problem()
    result = solve_tv_nonneg(operator, y, rho=1e4)
    assert result.estimate.min() >= 0.0
    assert np.ptp(result.estimate) <= 1e-3
    assert total_variation(result.estimate.reshape(8, 8)) <= 1e-2

def test_tv_requires_shape_for_plain_operators():
    """Test that operators without a grid need an explicit shape"""
    operator = SropOperator(draw_sketches(3, 5, seed=0))
    with pytest.raises(DimensionError):
        solve_tv_nonneg(operator, np.zeros(5), rho=1.0)

def test_nyquist_count():
    """Test Q(Q-1)+1"""
    assert nyquist_count(5) == 21
    assert nyquist_sketches(5).M == 21

@pytest.mark.parametrize("Q", [2, 3, 5, 8])
def test_nyquist_round_trip(Q):
    """Test exact recovery of constant-diagonal Hermitian matrices from Q(Q-1)+1 sketches"""
    rng = np.random.default_rng(Q)
    sketches = nyquist_sketches(Q)
    for _ in range(20):
        H = random_hermitian(Q, rng, constant_diagonal=True)
        recovered = nyquist_recover(srop_forward(H, sketches))
        assert np.linalg.norm(recovered.data - H.data) <= 1e-10 * H.frobenius_norm

def test_nyquist_rejects_wrong_counts():
    """Test that lengths other than Q(Q-1)+1 raise"""
    with pytest.raises(MeasurementCountError):
        nyquist_recover(np.zeros(20))
    with pytest.raises(MeasurementCountError):
        nyquist_recover(np.zeros(21), Q=4)
