import math

import numpy as np
import pytest

from eigenpsd.errors import DegenerateInput, DimensionMismatch
from eigenpsd.simulate import (
    ScenarioSpec,
    mix_at_snr,
    render_diffuse_noise,
    render_source,
    render_source_from_rir,
    simulate_scenario,
    speech_shaped_source,
)
from eigenpsd.spatial import ArrayScene, CoherenceModel
from eigenpsd.stft import analyze

SCENE = ArrayScene.linear(5, 0.08)


class TestSpeechShapedSource:
    def test_deterministic(self):
        a = speech_shaped_source(16000, 16000.0, 3)
        b = speech_shaped_source(16000, 16000.0, 3)
        np.testing.assert_array_equal(a, b)

    def test_unit_rms(self):
        x = speech_shaped_source(32000, 16000.0, 4)
        assert np.sqrt(np.mean(x ** 2)) == pytest.approx(1.0, abs=1e-12)

    def test_nonstationary_envelope(self):
        # syllabic modulation: loud and quiet 100 ms frames differ by > 10 dB
        x = speech_shaped_source(80000, 16000.0, 5)
        frames = x[: 80000 - 80000 % 1600].reshape(-1, 1600)
        e = 10 * np.log10(np.mean(frames ** 2, axis=1))
        assert np.percentile(e, 90) - np.percentile(e, 10) > 10.0


class TestRenderSource:
    def test_broadside_copies_input_to_all_channels(self):
        src = speech_shaped_source(16000, 16000.0, 6)
        x = render_source(src, SCENE)
        n = SCENE.frame_len
        for m in range(5):
            err = np.linalg.norm(x[n:-n, m] - src[n:-n]) / np.linalg.norm(src[n:-n])
            assert err <= 1e-9

    def test_zero_input_gives_zero_output(self):
        assert not render_source(np.zeros(4096), SCENE).any()

    def test_plane_wave_delays_via_cross_correlation(self):
        scene = ArrayScene.linear(5, 0.08, source_doa_deg=60.0)
        src = speech_shaped_source(32000, 16000.0, 7)
        x = render_source(src, scene)
        n = scene.frame_len
        per_mic = 0.08 * math.sin(math.radians(60.0)) / 343.0 * 16000.0
        a = x[n:-n, 0]
        nfft = 1 << (int(np.ceil(np.log2(a.shape[0]))) + 1)
        fa = np.fft.rfft(a, nfft)
        for m in range(1, 5):
            cc = np.fft.irfft(np.fft.rfft(x[n:-n, m], nfft) * np.conj(fa), nfft)
            cc = np.concatenate([cc[-50:], cc[:51]])
            i = int(np.argmax(cc))
            y0, y1, y2 = cc[i - 1], cc[i], cc[i + 1]
            lag = (i - 50) + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)
            assert lag == pytest.approx(m * per_mic, abs=0.25)

    def test_rir_rendering_with_delta_is_identity(self):
        src = speech_shaped_source(8000, 16000.0, 8)
        rirs = np.zeros((16, 3))
        rirs[0, :] = 1.0
        out = render_source_from_rir(src, rirs)
        for m in range(3):
            np.testing.assert_allclose(out[:, m], src, atol=1e-12)


class TestRenderDiffuseNoise:
    def test_single_mic_is_plain_gaussian(self):
        scene = ArrayScene(mic_positions=np.array([[0.0, 0, 0], [10.0, 0, 0]]))
        v = render_diffuse_noise(scene, 1, 32000)
        assert v.shape == (32000, 2)
        # far-spaced mics: coherence ~ 0, channels essentially independent
        c = np.corrcoef(v[:, 0], v[:, 1])[0, 1]
        assert abs(c) < 0.05

    def test_seed_determinism(self):
        a = render_diffuse_noise(SCENE, 42, 8192)
        b = render_diffuse_noise(SCENE, 42, 8192)
        np.testing.assert_array_equal(a, b)
        c = render_diffuse_noise(SCENE, 43, 8192)
        assert not np.array_equal(a, c)

    def test_decorrelated_at_sinc_zero_bin(self):
        # adjacent-pair coherence vanishes near f = c / (2 d) (bins 68-69)
        model = CoherenceModel.build(SCENE)
        n = 600 * SCENE.frame_len // 2
        v = render_diffuse_noise(SCENE, 9, n, model=model)
        spec = analyze(v, SCENE.stft_config())
        yk = spec.data[:, 69, :]
        psi = yk.conj().T @ yk / yk.shape[0]
        coh = psi[0, 1] / math.sqrt(psi[0, 0].real * psi[1, 1].real)
        assert abs(coh) <= 0.1

    def test_sample_coherence_converges_to_model(self):
        model = CoherenceModel.build(SCENE)
        n_frames = 2000
        n = (n_frames - 1) * SCENE.frame_len // 2
        v = render_diffuse_noise(SCENE, 123, n, model=model)
        spec = analyze(v, SCENE.stft_config())
        for k in (10, 30, 69, 120, 200, 250):
            yk = spec.data[:, k, :]
            psi = yk.conj().T @ yk / yk.shape[0]
            d = np.sqrt(np.real(np.diag(psi)))
            coh = psi / np.outer(d, d)
            assert np.abs(coh - model.gammas[k]).max() <= 0.05

    def test_shaping_validated(self):
        with pytest.raises(DimensionMismatch):
            render_diffuse_noise(SCENE, 0, 8192, shaping=np.ones(10))


class TestMixAtSnr:
    def test_zero_db_equalizes_power(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((4096, 2))
        v = rng.standard_normal((4096, 2)) * 3.0
        y, ref, scaled = mix_at_snr(x, v, 0.0)
        assert np.sum(scaled ** 2) == pytest.approx(np.sum(x ** 2), rel=1e-10)
        np.testing.assert_array_equal(ref, x[:, 0])

    def test_clean_sentinel(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal((1024, 3))
        v = rng.standard_normal((1024, 3))
        y, _, scaled = mix_at_snr(x, v, math.inf)
        np.testing.assert_array_equal(y, x)
        assert not scaled.any()

    def test_five_db_power_ratio(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal((4096, 5))
        v = rng.standard_normal((4096, 5))
        y, _, scaled = mix_at_snr(x, v, 5.0)
        ratio = np.sum(x ** 2) / np.sum(scaled ** 2)
        assert ratio == pytest.approx(10.0 ** 0.5, rel=1e-10)

    def test_decomposition_is_exact(self):
        rng = np.random.default_rng(15)
        x = rng.standard_normal((2048, 2))
        v = rng.standard_normal((2048, 2))
        y, _, scaled = mix_at_snr(x, v, 5.0)
        np.testing.assert_array_equal(y, x + scaled)

    def test_degenerate_inputs(self):
        ones = np.ones((128, 2))
        with pytest.raises(DegenerateInput):
            mix_at_snr(np.zeros((128, 2)), ones, 0.0)
        with pytest.raises(DegenerateInput):
            mix_at_snr(ones, np.zeros((128, 2)), 0.0)


class TestSimulateScenario:
    def test_components_sum_to_mixture(self):
        spec = ScenarioSpec(scene=SCENE, duration=1.0, snr_db=5.0, seed=0)
        sc = simulate_scenario(spec)
        np.testing.assert_array_equal(sc.mixture, sc.source_image + sc.noise)
        np.testing.assert_array_equal(sc.reference, sc.source_image[:, 0])

    def test_deterministic_per_seed(self):
        spec = ScenarioSpec(scene=SCENE, duration=0.5, snr_db=5.0, seed=3)
        a = simulate_scenario(spec)
        b = simulate_scenario(spec)
        np.testing.assert_array_equal(a.mixture, b.mixture)
