import numpy as np
import pytest

from mcfli.calibration.fields import (
    GeneralizedOperator,
    WavefieldSet,
    estimate_vignette,
    fringe_cross_correlation,
    generalized_forward,
    generalized_matrix,
    predict_speckle,
    synth_fields,
)
from mcfli.calibration.psi import phase_steps, read_fringes, recover_fields, render_fringes, write_fringes
from mcfli.core.io import read_array
from mcfli.core.layout import random_layout_1d
from mcfli.core.scene import gaussian_vignette, spike_scene
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import CalibrationError, DimensionError
from mcfli.sensing.combined import CombinedOperator
from mcfli.sensing.illumination import speckle
from mcfli.sensing.interferometric import interferometric_matrix
from mcfli.sensing.srop import debias, srop_forward

pytestmark = pytest.mark.calibration


def test_unperturbed_fields_carry_the_vignette(layout_2d, grid_2d):
    """Test |E_q|^2 = w for ideal fields"""
    w = gaussian_vignette(grid_2d)
    fields = synth_fields(layout_2d, vignette=w)
    np.testing.assert_allclose(np.abs(fields.fields) ** 2, np.broadcast_to(w.ravel(), fields.fields.shape))
    np.testing.assert_allclose(estimate_vignette(fields), w)

def test_unknown_perturbation_raises(layout_1d):
    """Test perturbation validation"""
    with pytest.raises(DimensionError):
        synth_fields(layout_1d, perturbation="twist", delta=0.1)

def test_predicted_speckle_matches_ideal_speckle(layout_2d, grid_2d):
    """Test that ideal fields predict the far-field speckle"""
    fields = synth_fields(layout_2d)
    alpha = draw_sketches(layout_2d.Q, 1, seed=2).vectors[0]
    np.testing.assert_allclose(predict_speckle(fields, alpha),
                               speckle(layout_2d, alpha).intensity.ravel(), rtol=1e-9, atol=1e-9)

def test_generalized_matrix_reduces_to_interferometric(layout_1d, grid_1d):
    """Test G[h] = I[h] for unperturbed fields"""
    scene = spike_scene(grid_1d, 10, seed=1)
    G = generalized_matrix(synth_fields(layout_1d), scene.vector)
    expected = interferometric_matrix(scene, layout_1d, "direct")
    assert np.linalg.norm(G.data - expected.data) <= 1e-10 * expected.frobenius_norm

def test_amplitude_ripple_stays_close_to_ideal(grid_1d):
    """Test that a 5 % amplitude ripple moves G[h] by at most 15 % in Frobenius norm"""
    layout = random_layout_1d(grid_1d, 4, seed=5)
    scene = spike_scene(grid_1d, 20, seed=6)
    ideal = generalized_matrix(synth_fields(layout), scene.vector)
    rippled = generalized_matrix(synth_fields(layout, perturbation="amplitude-ripple", delta=0.05, seed=3),
                                 scene.vector)
    deviation = np.linalg.norm(rippled.data - ideal.data) / ideal.frobenius_norm
    assert 0 < deviation <= 0.15

def test_phase_aberration_keeps_intensity(layout_2d):
    """Test that a phase-only perturbation leaves |E_q| unchanged"""
    fields = synth_fields(layout_2d, perturbation="phase-aberration", delta=0.3, seed=1)
    np.testing.assert_allclose(np.abs(fields.fields), 1.0)

def test_generalized_operator_is_srop_of_generalized_matrix(layout_1d, grid_1d):
    """Test debiased <S(alpha_m), h> = A_c(G[h]) and adjointness"""
    fields = synth_fields(layout_1d, perturbation="amplitude-ripple", delta=0.1, seed=2)
    sketches = draw_sketches(layout_1d.Q, 30, seed=3)
    h = spike_scene(grid_1d, 5, seed=4).vector
    operator = GeneralizedOperator(fields, sketches)
    expected = debias(srop_forward(generalized_matrix(fields, h), sketches))
    np.testing.assert_allclose(operator.forward(h), expected, rtol=1e-9, atol=1e-12)
    assert operator.adjointness_test(np.random.default_rng(0), trials=5) <= 1e-10

def test_generalized_forward_matches_combined_operator(layout_2d, grid_2d):
    """Test that ideal vignetted fields reproduce the combined operator"""
    w = gaussian_vignette(grid_2d)
    fields = synth_fields(layout_2d, vignette=w)
    sketches = draw_sketches(layout_2d.Q, 25, seed=1)
    scene = spike_scene(grid_2d, 12, seed=2)
    expected = CombinedOperator(layout_2d, sketches, vignette=w).forward(scene.vector)
    np.testing.assert_allclose(generalized_forward(fields, sketches, scene), expected, rtol=1e-9, atol=1e-12)

def test_fringe_stack_layout(layout_2d):
    """Test 8 frames per core plus the reference frame"""
    stack = render_fringes(synth_fields(layout_2d))
    assert stack.frames.shape == (layout_2d.Q, 8, layout_2d.grid.N)
    assert stack.frame_count == 8 * layout_2d.Q + 1
    assert stack.frames.min() >= 0
    np.testing.assert_allclose(phase_steps(), np.arange(8) * np.pi / 4)

def test_noiseless_fields_are_recovered_up_to_reference_phase(layout_2d, grid_2d):
    """Test E_q exp(-i arg E_ref) from the last DFT coefficient"""
    w = gaussian_vignette(grid_2d)
    truth = synth_fields(layout_2d, perturbation="phase-aberration", delta=0.2, vignette=w, seed=4)
    recovered = recover_fields(render_fringes(truth))
    reference_phase = np.exp(-1j * np.angle(truth.fields[0]))
    np.testing.assert_allclose(recovered.fields, truth.fields * reference_phase, atol=1e-10)
    assert recovered.referenced and recovered.mask.all()

def test_recovered_fields_predict_speckle(layout_2d):
    """Test unit cross-correlation of predicted and true speckle for noiseless fringes"""
    truth = synth_fields(layout_2d, perturbation="amplitude-ripple", delta=0.1, seed=1)
    recovered = recover_fields(render_fringes(truth))
    for alpha in draw_sketches(layout_2d.Q, 5, seed=6).vectors:
        assert fringe_cross_correlation(predict_speckle(recovered, alpha), predict_speckle(truth, alpha)) >= 0.999999

def test_dark_reference_raises(layout_1d, grid_1d):
    """Test that a reference dark over most of the field of view is refused"""
    fields = synth_fields(layout_1d).fields.copy()
    fields[0, : 3 * grid_1d.N // 4] = 0.0
    with pytest.raises(CalibrationError):
        recover_fields(render_fringes(WavefieldSet(grid_1d, fields)))

def test_fringe_files_round_trip(tmp_path, layout_2d):
    """Test the per-frame files and their manifest"""
    stack = render_fringes(synth_fields(layout_2d), noise_sigma=0.01, seed=3)
    manifest = write_fringes(stack, tmp_path)
    assert manifest.name == "manifest.json"
    assert (tmp_path / "core000_step7.f64").exists()
    restored = read_fringes(tmp_path)
    np.testing.assert_array_equal(restored.frames, stack.frames)
    np.testing.assert_array_equal(restored.reference, stack.reference)
    assert restored.noise_level == stack.noise_level > 0

def test_cross_correlation():
    """Test the normalized cross-correlation score"""
    a = np.arange(10.0)
    assert fringe_cross_correlation(a, 3 * a + 1) == pytest.approx(1.0)
    assert fringe_cross_correlation(a, -a) == pytest.approx(-1.0)
    assert fringe_cross_correlation(a, np.ones(10)) == 0.0

def test_field_set_save(tmp_path, layout_2d, grid_2d):
    """Test that fields export as a (Q, n1, n1) complex array"""
    fields = synth_fields(layout_2d)
    restored = read_array(fields.save(tmp_path / "fields.mcfa"))
    assert restored.shape == (layout_2d.Q,) + grid_2d.shape
    np.testing.assert_allclose(np.abs(restored), 1.0)
