"""Synthetic test scenes: a free-field point source in a diffuse noise field.

The source image at the array is rendered by applying the free-field steering
vector per STFT bin. Diffuse noise is generated directly in the STFT domain
by coloring i.i.d. circular complex Gaussian bin noise with the Cholesky
factor of the loaded coherence matrix, so the generated field realizes the
same spatial model the enhancement assumes. The mixture is scaled to a target
broadband SNR measured in the time domain.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DegenerateInput, DimensionMismatch
from .spatial import ArrayScene, CoherenceModel, steering_matrix
from .stft import Spectrogram, analyze, synthesize


@dataclass
class ScenarioSpec:
    """Recipe for one synthetic scene."""

    scene: ArrayScene
    duration: float = 10.0  # seconds, used when no source is supplied
    snr_db: float = 5.0  # math.inf means noiseless
    seed: int = 0
    source: np.ndarray | None = None  # mono samples; synthesized when None
    noise_shaping: np.ndarray | None = None  # per-bin magnitude (K,), optional


@dataclass
class Scenario:
    """Rendered scene: mixture, clean reference, and its exact components."""

    mixture: np.ndarray  # (n, M)
    reference: np.ndarray  # (n,) source image at mic 1
    source_image: np.ndarray  # (n, M)
    noise: np.ndarray  # (n, M), already scaled; mixture == source_image + noise
    snr_db: float


def speech_shaped_source(num_samples: int, sample_rate: float, seed, *,
                         modulation_depth: float = 1.3,
                         modulation_hz: float = 3.0) -> np.ndarray:
    """Nonstationary speech-like test signal: tilted noise with a slow
    log-normal energy envelope (syllable-rate modulation), unit RMS."""
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(num_samples)
    freqs = np.fft.rfftfreq(num_samples, 1.0 / sample_rate)
    # Long-term spectral tilt: rises toward ~330 Hz, then falls ~9 dB/octave.
    x = freqs / 400.0
    tilt = x / (1.0 + x * x) ** 1.25
    carrier = np.fft.irfft(np.fft.rfft(white) * tilt, n=num_samples)

    envelope_noise = rng.standard_normal(num_samples)
    lowpass = np.exp(-0.5 * (freqs / modulation_hz) ** 2)
    slow = np.fft.irfft(np.fft.rfft(envelope_noise) * lowpass, n=num_samples)
    sd = np.std(slow)
    if sd > 0:
        slow = slow / sd
    out = carrier * np.exp(modulation_depth * slow)
    rms = np.sqrt(np.mean(out ** 2))
    if rms == 0.0:
        raise DegenerateInput("generated source has zero energy")
    return out / rms


def render_source(source: np.ndarray, scene: ArrayScene) -> np.ndarray:
    """Steer a mono source to the array: X_m(l,k) = h_m(k) S(l,k), then OLA."""
    source = np.asarray(source, dtype=np.float64)
    if source.ndim != 1:
        raise DimensionMismatch(f"source must be mono, got shape {source.shape}")
    cfg = scene.stft_config()
    spec = analyze(source, cfg)
    h = steering_matrix(scene)  # (K, M)
    data = spec.data[:, :, 0][:, :, None] * h[None, :, :]
    steered = Spectrogram(data=data, cfg=cfg, num_samples=spec.num_samples)
    return synthesize(steered)


def render_source_from_rir(source: np.ndarray, rirs: np.ndarray) -> np.ndarray:
    """Alternative source rendering for user-supplied impulse responses."""
    source = np.asarray(source, dtype=np.float64)
    rirs = np.asarray(rirs, dtype=np.float64)
    if rirs.ndim == 1:
        rirs = rirs[:, None]
    out = np.empty((source.shape[0], rirs.shape[1]))
    for m in range(rirs.shape[1]):
        out[:, m] = fftconvolve(source, rirs[:, m])[: source.shape[0]]
    return out


def render_diffuse_noise(scene: ArrayScene, seed, num_samples: int, *,
                         model: CoherenceModel | None = None,
                         shaping: np.ndarray | None = None) -> np.ndarray:
    """Coherence-matched diffuse noise, (num_samples, M), deterministic per seed.

    shaping, if given, is a per-bin magnitude profile (K,) imposed on the
    otherwise flat Gaussian spectra (e.g. a long-term speech spectrum for
    babble-like noise).
    """
    if model is None:
        model = CoherenceModel.build(scene)
    cfg = scene.stft_config()
    m = scene.num_mics
    k_bins = model.num_bins
    n_frames = -(-num_samples // cfg.hop) + 1
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n_frames, k_bins, m, 2))
    z = (noise[..., 0] + 1j * noise[..., 1]) / math.sqrt(2.0)
    colored = np.einsum("kij,lkj->lki", model.chols, z)
    if shaping is not None:
        shaping = np.asarray(shaping, dtype=np.float64)
        if shaping.shape != (k_bins,):
            raise DimensionMismatch(f"shaping must have shape ({k_bins},), got {shaping.shape}")
        colored = colored * shaping[None, :, None]
    # sqrt(frame_len) makes the synthesized channels roughly unit variance;
    # the absolute scale is irrelevant once the mixture is set to an SNR.
    spec = Spectrogram(data=colored * math.sqrt(cfg.frame_len),
                       cfg=cfg, num_samples=num_samples)
    return synthesize(spec)


def long_term_spectrum(samples: np.ndarray, scene: ArrayScene) -> np.ndarray:
    """Average per-bin magnitude of a mono signal, for noise shaping."""
    spec = analyze(np.asarray(samples, dtype=np.float64), scene.stft_config())
    mag = np.sqrt(np.mean(np.abs(spec.data[:, :, 0]) ** 2, axis=0))
    peak = mag.max()
    if peak == 0:
        raise DegenerateInput("shaping signal has zero energy")
    return mag / peak


def mix_at_snr(source_image: np.ndarray, noise: np.ndarray, snr_db: float):
    """Scale the noise so 10 log10(||x||^2 / ||a v||^2) = snr_db.

    Returns (mixture, reference, scaled_noise); snr_db = math.inf returns the
    noiseless mixture (scale 0). The reference is the source image at mic 1.
    """
    x = np.asarray(source_image, dtype=np.float64)
    v = np.asarray(noise, dtype=np.float64)
    if x.ndim != 2 or x.shape != v.shape:
        raise DimensionMismatch(f"source image {x.shape} vs noise {v.shape}")
    if math.isinf(snr_db) and snr_db > 0:
        return x.copy(), x[:, 0].copy(), np.zeros_like(v)
    px = float(np.sum(x * x))
    pv = float(np.sum(v * v))
    if px == 0.0 or pv == 0.0:
        raise DegenerateInput("cannot set an SNR with a zero-energy component")
    alpha = math.sqrt(px / (pv * 10.0 ** (snr_db / 10.0)))
    scaled = alpha * v
    return x + scaled, x[:, 0].copy(), scaled


def simulate_scenario(spec: ScenarioSpec) -> Scenario:
    """Render a full scene from its recipe, deterministically per seed."""
    scene = spec.scene
    source_seed, noise_seed = np.random.SeedSequence(spec.seed).spawn(2)
    if spec.source is None:
        n = int(round(spec.duration * scene.sample_rate))
        source = speech_shaped_source(n, scene.sample_rate, source_seed)
    else:
        source = np.asarray(spec.source, dtype=np.float64)
    x = render_source(source, scene)
    v = render_diffuse_noise(scene, noise_seed, x.shape[0], shaping=spec.noise_shaping)
    mixture, reference, scaled = mix_at_snr(x, v, spec.snr_db)
    return Scenario(mixture=mixture, reference=reference, source_image=x,
                    noise=scaled, snr_db=spec.snr_db)
