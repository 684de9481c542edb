"""WAV file I/O: reads PCM 16/24/32-bit and float32/64, writes float32."""

import numpy as np
from scipy.io import wavfile

from .errors import FormatError


def read_wav(path) -> tuple[float, np.ndarray]:
    """Read a WAV file as ((sample_rate, samples)); samples are float64 in
    [-1, 1) shaped (n, channels)."""
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if data.ndim == 1:
        data = data[:, None]
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        # scipy returns 24-bit PCM widened into the top bytes of int32
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:
        raise FormatError(f"{path}: unsupported sample format {data.dtype}")
    return float(rate), samples


def write_wav(path, sample_rate: float, samples: np.ndarray) -> None:
    """Write samples (n,) or (n, channels) as 32-bit float WAV."""
    data = np.asarray(samples, dtype=np.float32)
    if data.ndim == 2 and data.shape[1] == 1:
        data = data[:, 0]
    wavfile.write(path, int(round(sample_rate)), data)
