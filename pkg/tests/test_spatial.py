import numpy as np
import pytest

from eigenpsd.errors import InvalidConfig
from eigenpsd.linalg import cholesky
from eigenpsd.spatial import (
    ArrayScene,
    CoherenceModel,
    diffuse_coherence,
    parse_geometry,
    relative_delays,
    steering_matrix,
    steering_retf,
)

SCENE = ArrayScene.linear(5, 0.08)


def test_scene_validation():
    with pytest.raises(InvalidConfig):
        ArrayScene(mic_positions=np.zeros((1, 3)))
    with pytest.raises(InvalidConfig):
        ArrayScene(mic_positions=np.full((3, 3), np.inf))


def test_parse_geometry_linear_shorthand():
    pos = parse_geometry("linear:5:0.08")
    assert pos.shape == (5, 3)
    np.testing.assert_allclose(pos[:, 0], 0.08 * np.arange(5))
    assert not pos[:, 1:].any()


def test_parse_geometry_explicit_coordinates():
    pos = parse_geometry("0,0,0; 0.08,0,0.01 ; 0.16, 0, 0")
    assert pos.shape == (3, 3)
    assert pos[1, 2] == 0.01


@pytest.mark.parametrize("bad", ["linear:1:0.08", "linear:5", "0,0; 1,1", "linear:5:x"])
def test_parse_geometry_rejects(bad):
    with pytest.raises(InvalidConfig):
        parse_geometry(bad)


def test_unit_diagonal_before_loading():
    for k in (0, 17, 200):
        g = diffuse_coherence(SCENE, k, loading=0.0)
        np.testing.assert_array_equal(np.diag(g).real, 1.0)


def test_zero_frequency_is_all_ones():
    g = diffuse_coherence(SCENE, 0, loading=0.0)
    np.testing.assert_array_equal(g, np.ones((5, 5)))


def test_sinc_zero_at_half_wavelength_spacing():
    # f = c / (2 d) makes the sinc argument exactly pi for adjacent mics;
    # frame_len/sample_rate chosen so a bin lands on that frequency.
    scene = ArrayScene(mic_positions=np.array([[0.0, 0, 0], [0.08, 0, 0]]),
                       sample_rate=4287.5, frame_len=16)
    assert scene.bin_frequency(8) == 2143.75
    g = diffuse_coherence(scene, 8, loading=0.0)
    assert abs(g[0, 1]) <= 1e-12


def test_coherence_is_real_symmetric_and_bounded():
    for k in (1, 32, 128, 256):
        g = diffuse_coherence(SCENE, k, loading=0.0)
        assert np.abs(g.imag).max() == 0.0
        np.testing.assert_array_equal(g, g.T)
        assert np.abs(g).max() <= 1.0 + 1e-15


def test_loading_keeps_unit_diagonal_and_makes_pd():
    model = CoherenceModel.build(SCENE)
    assert model.num_bins == SCENE.num_bins
    for k in range(model.num_bins):
        np.testing.assert_allclose(np.diag(model.gammas[k]).real, 1.0, atol=1e-15)
        cholesky(model.gammas[k])  # raises if not PD


def test_steering_broadside_is_ones():
    h = steering_retf(SCENE, 100)
    np.testing.assert_array_equal(h, np.ones(5))


def test_steering_zero_frequency_is_ones():
    scene = ArrayScene.linear(5, 0.08, source_doa_deg=47.0)
    np.testing.assert_array_equal(steering_retf(scene, 0), np.ones(5))


def test_steering_endfire_phase():
    # DOA 90 deg, d = 0.08 m, f = 1000 Hz = bin 32 at 16 kHz / 512
    scene = ArrayScene.linear(2, 0.08, source_doa_deg=90.0)
    h = steering_retf(scene, 32)
    assert h[0] == 1.0
    expected = -2 * np.pi * 1000.0 * 0.08 / 343.0
    np.testing.assert_allclose(np.angle(h[1]), expected, atol=1e-12)


def test_steering_unit_modulus_and_reference_normalized():
    scene = ArrayScene.linear(5, 0.08, source_doa_deg=33.0)
    h = steering_matrix(scene)
    np.testing.assert_array_equal(h[:, 0], 1.0)
    np.testing.assert_allclose(np.abs(h), 1.0, atol=1e-14)


def test_relative_delays_signs():
    scene = ArrayScene.linear(3, 0.1, source_doa_deg=90.0)
    tau = relative_delays(scene)
    np.testing.assert_allclose(tau, [0.0, 0.1 / 343.0, 0.2 / 343.0], atol=1e-15)
