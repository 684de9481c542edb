"""MVDR beamformer and the Wiener spectral gain, applied per bin per frame.

The multichannel Wiener filter w = phi_s psi_y^-1 h factorizes exactly into a
distortionless MVDR beamformer, w = gamma^-1 h / (h^H gamma^-1 h), followed
by a single-channel Wiener gain on its output: with q = h^H gamma^-1 h the
diffuse power left after the beamformer is phi_d / q, so the gain is
phi_s / (phi_s + phi_d / q). Gains always lie in [0, 1]; the 0/0 case (no
target, no diffuse power) is defined as 0.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidConfig
from .spatial import CoherenceModel
from .stft import Spectrogram

MODES = ("passthrough", "mvdr", "mwf_smooth", "mwf_inst")


@dataclass(frozen=True)
class BeamformerWeights:
    """Filter weights per bin (K, M) or per frame and bin (L, K, M)."""

    weights: np.ndarray
    mode: str = "mvdr"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfig(f"unknown mode {self.mode!r}, expected one of {MODES}")


def mvdr(gamma, h: np.ndarray) -> np.ndarray:
    """Distortionless weights gamma^-1 h / (h^H gamma^-1 h); w^H h = 1."""
    h = np.asarray(h, dtype=np.complex128)
    t = linalg.hermitian_inverse_apply(gamma, h)
    denom = np.real(np.vdot(h, t))
    return t / denom


def h_gamma_inv_h(gamma, h: np.ndarray) -> float:
    """The real positive quadratic form h^H gamma^-1 h."""
    h = np.asarray(h, dtype=np.complex128)
    return float(np.real(np.vdot(h, linalg.hermitian_inverse_apply(gamma, h))))


def mwf_gain(phi_s: float, phi_d: float, h: np.ndarray, gamma, *,
             noise_form: float | None = None) -> float:
    """Wiener gain phi_s / (phi_s + phi_d / (h^H gamma^-1 h)), in [0, 1].

    This is the gain that makes mvdr * gain equal the full Wiener filter
    phi_s psi_y^-1 h on the rank-one-plus-diffuse model. noise_form, if
    given, short-circuits the quadratic form (it only depends on the
    presumed-known gamma and h, so callers precompute it per bin).
    """
    if noise_form is None:
        noise_form = h_gamma_inv_h(gamma, h)
    num = phi_s * noise_form
    den = num + phi_d
    if den <= 0.0:
        return 0.0
    return num / den


def mvdr_weights(model: CoherenceModel, steering: np.ndarray) -> np.ndarray:
    """Per-bin MVDR weights, shape (K, M), for a whole coherence model."""
    k_bins, m = steering.shape
    if model.num_bins != k_bins:
        raise DimensionMismatch(f"model K={model.num_bins} vs steering K={k_bins}")
    w = np.empty((k_bins, m), np.complex128)
    for k in range(k_bins):
        w[k] = mvdr(model.gammas[k], steering[k])
    return w


def apply(spec: Spectrogram, weights, gains: np.ndarray | None = None) -> Spectrogram:
    """Filter a multichannel spectrogram down to one output channel.

    weights may be a BeamformerWeights, a per-bin (K, M) array, or a per
    frame-and-bin (L, K, M) array; output(l, k) = w(l, k)^H y(l, k), scaled
    by the optional real gain field (L, K).
    """
    if isinstance(weights, BeamformerWeights):
        weights = weights.weights
    w = np.asarray(weights, dtype=np.complex128)
    y = spec.data
    if w.ndim == 2:
        if w.shape != y.shape[1:]:
            raise DimensionMismatch(f"weights {w.shape} vs spectrogram {y.shape}")
        out = np.einsum("km,lkm->lk", w.conj(), y)
    elif w.ndim == 3:
        if w.shape != y.shape:
            raise DimensionMismatch(f"weights {w.shape} vs spectrogram {y.shape}")
        out = np.einsum("lkm,lkm->lk", w.conj(), y)
    else:
        raise DimensionMismatch(f"weights must be (K, M) or (L, K, M), got {w.shape}")
    if gains is not None:
        gains = np.asarray(gains, dtype=np.float64)
        if gains.shape != out.shape:
            raise DimensionMismatch(f"gains {gains.shape} vs output {out.shape}")
        out = out * gains
    return Spectrogram(data=out[:, :, None], cfg=spec.cfg, num_samples=spec.num_samples)


def passthrough(spec: Spectrogram, channel: int = 0) -> Spectrogram:
    """Identity filter selecting one input channel."""
    m = spec.num_channels
    w = np.zeros((spec.num_bins, m), np.complex128)
    w[:, channel] = 1.0
    return apply(spec, w)
