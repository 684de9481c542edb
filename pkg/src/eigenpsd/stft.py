"""Square-root Hann STFT analysis/synthesis at 50% overlap.

The window is the periodic (DFT-even) Hann raised to 1/2, applied on both the
analysis and synthesis side, so the squared-window overlap-add sum is the
constant 1 and reconstruction needs no renormalization. The signal is padded
with frame_len - hop zeros in front and up to one hop of zeros at the back;
frame l then covers padded samples [l*hop, l*hop + frame_len) and the frame
count is ceil(n / hop). The first and last frame's worth of samples are edge
transients and are excluded from reconstruction guarantees.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidConfig


@dataclass(frozen=True)
class StftConfig:
    frame_len: int = 512
    hop: int = 256
    sample_rate: float = 16000.0

    def __post_init__(self):
        if self.frame_len <= 0 or self.frame_len % 2 != 0:
            raise InvalidConfig(f"frame_len must be a positive even number, got {self.frame_len}")
        if self.hop * 2 != self.frame_len:
            raise InvalidConfig(
                f"hop must be frame_len/2 for perfect reconstruction, got {self.hop}"
            )
        if self.sample_rate <= 0:
            raise InvalidConfig(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def num_bins(self) -> int:
        return self.frame_len // 2 + 1

    def bin_frequency(self, k: int) -> float:
        """Center frequency in Hz of bin k."""
        return k * self.sample_rate / self.frame_len


@dataclass
class Spectrogram:
    """Complex STFT coefficients indexed (frame, bin, channel)."""

    data: np.ndarray  # complex128, shape (L, K, M)
    cfg: StftConfig
    num_samples: int  # original time-domain length, for exact-length synthesis

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]

    @property
    def num_bins(self) -> int:
        return self.data.shape[1]

    @property
    def num_channels(self) -> int:
        return self.data.shape[2]


@lru_cache(maxsize=8)
def sqrt_hann_window(frame_len: int) -> np.ndarray:
    """Square root of the periodic Hann window of the given length."""
    n = np.arange(frame_len)
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / frame_len)
    w = np.sqrt(w)
    w.setflags(write=False)
    return w


def _as_channels(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidConfig(f"signal must be 1-D or (samples, channels), got ndim={x.ndim}")
    return x


def analyze(signal, cfg: StftConfig) -> Spectrogram:
    """Forward STFT of a real signal shaped (n,) or (n, channels)."""
    x = _as_channels(signal)
    n = x.shape[0]
    if n < cfg.frame_len:
        raise InvalidConfig(f"signal length {n} is shorter than one frame ({cfg.frame_len})")
    hop, flen = cfg.hop, cfg.frame_len
    n_frames = -(-n // hop)  # ceil
    pad_front = flen - hop
    pad_back = n_frames * hop - n
    padded = np.pad(x, ((pad_front, pad_back), (0, 0)))
    # (L, frame_len, M) strided view of overlapping frames
    frames = np.lib.stride_tricks.sliding_window_view(padded, flen, axis=0)[::hop]
    frames = np.transpose(frames, (0, 2, 1))
    windowed = frames * sqrt_hann_window(flen)[None, :, None]
    data = np.fft.rfft(windowed, axis=1)
    return Spectrogram(data=np.ascontiguousarray(data), cfg=cfg, num_samples=n)


def synthesize(spec: Spectrogram, cfg: StftConfig | None = None) -> np.ndarray:
    """Inverse STFT by windowed overlap-add; returns shape (n, channels)."""
    if cfg is None:
        cfg = spec.cfg
    if cfg != spec.cfg:
        raise InvalidConfig("spectrogram was produced with a different STFT configuration")
    if spec.data.shape[1] != cfg.num_bins:
        raise InvalidConfig(
            f"spectrogram has {spec.data.shape[1]} bins, config implies {cfg.num_bins}"
        )
    hop, flen = cfg.hop, cfg.frame_len
    n_frames, _, n_ch = spec.data.shape
    frames = np.fft.irfft(spec.data, n=flen, axis=1)
    frames *= sqrt_hann_window(flen)[None, :, None]
    total = (n_frames - 1) * hop + flen
    out = np.zeros((total, n_ch))
    for l in range(n_frames):
        out[l * hop:l * hop + flen] += frames[l]
    pad_front = flen - hop
    return out[pad_front:pad_front + spec.num_samples]
