import numpy as np
import pytest
from scipy.signal import butter, lfilter

from eigenpsd.errors import LengthMismatch
from eigenpsd.metrics import cepstral_distance, fw_seg_sir, score
from eigenpsd.simulate import speech_shaped_source


@pytest.fixture(scope="module")
def speech():
    return speech_shaped_source(64000, 16000.0, 11)


class TestFwSegSir:
    def test_identical_signals_hit_clamp_ceiling(self, speech):
        assert fw_seg_sir(speech, speech).fw_seg_sir == 35.0

    def test_equal_power_white_noise_near_zero_db(self):
        # white reference + independent white noise of the same variance
        # puts every band at 0 dB in expectation
        rng = np.random.default_rng(3)
        ref = rng.standard_normal(64000)
        got = fw_seg_sir(ref, ref + rng.standard_normal(64000)).fw_seg_sir
        assert abs(got) <= 1.0

    def test_negated_signal(self, speech):
        # interference is -2x the reference: every band sits at -6.02 dB
        got = fw_seg_sir(speech, -speech).fw_seg_sir
        assert got <= -3.0
        assert got == pytest.approx(-6.0206, abs=1.0)

    def test_monotone_in_noise_level(self, speech):
        rng = np.random.default_rng(4)
        noise = rng.standard_normal(speech.shape[0]) * np.std(speech)
        scores = [fw_seg_sir(speech, speech + lvl * noise).fw_seg_sir
                  for lvl in (0.1, 0.3, 1.0, 3.0, 10.0)]
        assert all(a > b for a, b in zip(scores, scores[1:]))

    def test_silent_reference_frames_excluded(self, speech):
        padded = np.concatenate([np.zeros(8000), speech])
        report = fw_seg_sir(padded, padded + 1e-6)
        total = report.sir_trace.shape[0]
        assert 0 < report.frames_scored < total

    def test_length_mismatch(self, speech):
        with pytest.raises(LengthMismatch):
            fw_seg_sir(speech, speech[:-1])


class TestCepstralDistance:
    def test_identical_signals_score_zero(self, speech):
        assert cepstral_distance(speech, speech).cepstral_distance == 0.0

    def test_symmetric(self, speech):
        other = lfilter([0.5], [1.0, -0.5], speech)
        ab = cepstral_distance(speech, other).cepstral_distance
        ba = cepstral_distance(other, speech).cepstral_distance
        assert abs(ab - ba) <= 1e-10

    def test_strong_lowpass_exceeds_one_db(self, speech):
        b, a = butter(4, 1000.0 / 8000.0)
        assert cepstral_distance(speech, lfilter(b, a, speech)).cepstral_distance > 1.0

    def test_spectral_tilt_regression_value(self, speech):
        # frozen from this implementation's own oracle run (one-pole lowpass,
        # pole 0.5, on the seed-11 speech-shaped source)
        tilted = lfilter([0.5], [1.0, -0.5], speech)
        got = cepstral_distance(speech, tilted).cepstral_distance
        assert got == pytest.approx(3.162199287558622, rel=1e-6)

    def test_bounded_by_ceiling(self, speech):
        rng = np.random.default_rng(5)
        noisy = rng.standard_normal(speech.shape[0]) * 10.0
        assert 0.0 < cepstral_distance(speech, noisy).cepstral_distance <= 10.0

    def test_length_mismatch(self, speech):
        with pytest.raises(LengthMismatch):
            cepstral_distance(speech, speech[:-3])


def test_combined_report_and_format(speech):
    rng = np.random.default_rng(6)
    report = score(speech, speech + 0.1 * rng.standard_normal(speech.shape[0]))
    text = report.format()
    assert "fw_seg_sir_db" in text and "cepstral_distance_db" in text
    assert report.frames_scored > 0
    assert report.sir_trace.shape == report.cd_trace.shape
