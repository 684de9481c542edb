"""Presumed-known spatial quantities: diffuse coherence and steering vectors.

The diffuse field follows the spherically isotropic model, whose
inter-microphone coherence is sinc(2 pi f d / c) for spacing d. The relative
transfer function of the target is the far-field plane-wave steering vector
for a given direction of arrival, referenced to the first microphone.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .linalg import cholesky
from .stft import StftConfig

SPEED_OF_SOUND = 343.0
DEFAULT_LOADING = 1e-3


@dataclass(frozen=True)
class ArrayScene:
    """Microphone geometry plus the sampling context spatial quantities need."""

    mic_positions: np.ndarray  # (M, 3) meters
    source_doa_deg: float = 0.0  # relative to broadside (y axis); 90 = endfire (+x)
    speed_of_sound: float = SPEED_OF_SOUND
    sample_rate: float = 16000.0
    frame_len: int = 512

    def __post_init__(self):
        pos = np.asarray(self.mic_positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 2:
            raise InvalidConfig(f"mic_positions must be (M>=2, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise InvalidConfig("mic positions must be finite")
        pos = pos.copy()
        pos.setflags(write=False)
        object.__setattr__(self, "mic_positions", pos)

    @classmethod
    def linear(cls, num_mics: int, spacing_m: float, **kwargs) -> "ArrayScene":
        """Uniform linear array along the x axis, first mic at the origin."""
        pos = np.zeros((num_mics, 3))
        pos[:, 0] = spacing_m * np.arange(num_mics)
        return cls(mic_positions=pos, **kwargs)

    @property
    def num_mics(self) -> int:
        return self.mic_positions.shape[0]

    @property
    def num_bins(self) -> int:
        return self.frame_len // 2 + 1

    def stft_config(self) -> StftConfig:
        return StftConfig(self.frame_len, self.frame_len // 2, self.sample_rate)

    def bin_frequency(self, k: int) -> float:
        return k * self.sample_rate / self.frame_len


def parse_geometry(text: str) -> np.ndarray:
    """Parse a geometry string into (M, 3) positions in meters.

    Accepts the shorthand "linear:M:spacing_m" or a semicolon-separated list
    of comma-separated 3-D coordinates, e.g. "0,0,0; 0.08,0,0".
    """
    text = text.strip()
    if text.lower().startswith("linear:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidConfig(f"bad linear geometry {text!r}, expected linear:M:spacing_m")
        try:
            m = int(parts[1])
            spacing = float(parts[2])
        except ValueError as exc:
            raise InvalidConfig(f"bad linear geometry {text!r}: {exc}") from exc
        if m < 2 or spacing <= 0:
            raise InvalidConfig("linear geometry needs M >= 2 and spacing > 0")
        pos = np.zeros((m, 3))
        pos[:, 0] = spacing * np.arange(m)
        return pos
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coords = [c for c in chunk.replace(",", " ").split() if c]
        if len(coords) != 3:
            raise InvalidConfig(f"coordinate {chunk!r} must have 3 components")
        try:
            rows.append([float(c) for c in coords])
        except ValueError as exc:
            raise InvalidConfig(f"bad coordinate {chunk!r}: {exc}") from exc
    if len(rows) < 2:
        raise InvalidConfig("geometry needs at least 2 microphones")
    return np.asarray(rows)


def diffuse_coherence(scene: ArrayScene, k: int, *, loading: float = DEFAULT_LOADING) -> np.ndarray:
    """Spherically isotropic coherence matrix for bin k.

    Gamma_ij = sinc(2 pi f d_ij / c) with f the bin center frequency, then
    diagonal loading Gamma <- (Gamma + eps I) / (1 + eps) which keeps the unit
    diagonal while making the matrix safely positive definite (it is exactly
    singular at f = 0). Pass loading=0 for the raw model.
    """
    f = scene.bin_frequency(k)
    pos = scene.mic_positions
    d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    # np.sinc(x) = sin(pi x)/(pi x), so the argument 2 f d / c yields
    # sin(2 pi f d / c) / (2 pi f d / c).
    gamma = np.sinc(2.0 * f * d / scene.speed_of_sound)
    if loading:
        m = gamma.shape[0]
        gamma = (gamma + loading * np.eye(m)) / (1.0 + loading)
    return gamma.astype(np.complex128)


@dataclass(frozen=True)
class CoherenceModel:
    """Per-bin loaded coherence matrices and their Cholesky factors."""

    gammas: np.ndarray  # (K, M, M) complex
    chols: np.ndarray  # (K, M, M) complex, lower factors of gammas
    loading: float = DEFAULT_LOADING

    @classmethod
    def build(cls, scene: ArrayScene, *, loading: float = DEFAULT_LOADING) -> "CoherenceModel":
        k_bins = scene.num_bins
        m = scene.num_mics
        gammas = np.empty((k_bins, m, m), np.complex128)
        chols = np.empty((k_bins, m, m), np.complex128)
        for k in range(k_bins):
            gammas[k] = diffuse_coherence(scene, k, loading=loading)
            chols[k] = cholesky(gammas[k])
        return cls(gammas=gammas, chols=chols, loading=loading)

    @property
    def num_bins(self) -> int:
        return self.gammas.shape[0]


def relative_delays(scene: ArrayScene) -> np.ndarray:
    """Far-field arrival delays of each mic relative to mic 1, in seconds."""
    theta = np.deg2rad(scene.source_doa_deg)
    direction = np.array([np.sin(theta), np.cos(theta), 0.0])
    rel = scene.mic_positions - scene.mic_positions[0]
    return rel @ direction / scene.speed_of_sound


def steering_retf(scene: ArrayScene, k: int) -> np.ndarray:
    """Free-field steering vector at bin k, normalized so h[0] = 1 exactly."""
    tau = relative_delays(scene)
    f = scene.bin_frequency(k)
    h = np.exp(-2j * np.pi * f * tau)
    h[0] = 1.0
    return h


def steering_matrix(scene: ArrayScene) -> np.ndarray:
    """Steering vectors for all bins, shape (K, M)."""
    tau = relative_delays(scene)
    freqs = np.arange(scene.num_bins) * scene.sample_rate / scene.frame_len
    h = np.exp(-2j * np.pi * freqs[:, None] * tau[None, :])
    h[:, 0] = 1.0
    return h
