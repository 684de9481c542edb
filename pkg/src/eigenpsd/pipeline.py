"""End-to-end enhancement: STFT, tracking, PSD estimation, filtering, OLA.

One pass over the input runs the recursive correlation tracker and produces
the MVDR output together with both Wiener gain fields (smooth and
instantaneous PSD estimates share the tracking work), so a parameter sweep
needs a single tracked run per time constant.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from . import beamformer
from .errors import DimensionMismatch, InvalidConfig, NoConvergence
from .linalg import JACOBI_MAX_SWEEPS, JACOBI_TOL
from .spatial import ArrayScene, CoherenceModel, steering_matrix
from .stft import Spectrogram, analyze, synthesize
from .tracker import DEFAULT_INIT_SCALE, forgetting_factor


@dataclass
class EnhanceResult:
    """Time-domain outputs for every filter mode plus tracking diagnostics."""

    outputs: dict  # mode name -> mono samples (n,)
    gains: np.ndarray  # (2, L, K): [smooth, instantaneous] Wiener gains
    psd: np.ndarray  # (4, L, K): phi_s_sm, phi_d_sm, phi_s_inst, phi_d_inst
    clamp_fraction: float  # share of (frame, bin) cells with a clamped target power
    num_frames: int = 0
    num_bins: int = 0


def enhance_all(samples: np.ndarray, scene: ArrayScene, tau: float, *,
                model: CoherenceModel | None = None,
                hybrid_diffuse: bool = False,
                gain_floor_db: float | None = None,
                init_scale: float = DEFAULT_INIT_SCALE) -> EnhanceResult:
    """Run the full pipeline on (n, M) samples and return all filter modes.

    tau is the correlation-averaging time constant in seconds. The optional
    gain floor (in dB, e.g. -15) lower-bounds the Wiener gains for listening
    comfort; it is off by default and never used in verification.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != scene.num_mics:
        raise DimensionMismatch(
            f"samples {samples.shape} vs scene with {scene.num_mics} mics"
        )
    cfg = scene.stft_config()
    spec = analyze(samples, cfg)
    if model is None:
        model = CoherenceModel.build(scene)
    h = steering_matrix(scene)
    w = beamformer.mvdr_weights(model, h)
    noise_form = np.array(
        [beamformer.h_gamma_inv_h(model.gammas[k], h[k]) for k in range(model.num_bins)]
    )
    gamma_h = np.einsum("kij,kj->ki", model.gammas, h)
    h_norm_sq = np.real(np.einsum("km,km->k", h.conj(), h))
    zeta = forgetting_factor(tau, cfg.hop, cfg.sample_rate)

    out_mvdr, gains, psd, clamp_count, status = _k.tracked_enhance(
        spec.data, model.gammas, model.chols, np.ascontiguousarray(gamma_h),
        np.ascontiguousarray(h_norm_sq), np.ascontiguousarray(noise_form),
        np.ascontiguousarray(w), zeta, init_scale,
        JACOBI_TOL, JACOBI_MAX_SWEEPS, hybrid_diffuse,
    )
    if status != _k.STATUS_OK:
        raise NoConvergence("eigendecomposition failed inside the tracking loop")

    applied = gains
    if gain_floor_db is not None:
        applied = np.maximum(gains, 10.0 ** (gain_floor_db / 20.0))

    def synth(data_lk):
        s = Spectrogram(data=data_lk[:, :, None], cfg=cfg, num_samples=spec.num_samples)
        return synthesize(s)[:, 0]

    outputs = {
        "passthrough": synthesize(beamformer.passthrough(spec))[:, 0],
        "mvdr": synth(out_mvdr),
        "mwf_smooth": synth(out_mvdr * applied[0]),
        "mwf_inst": synth(out_mvdr * applied[1]),
    }
    n_frames, n_bins = out_mvdr.shape
    return EnhanceResult(
        outputs=outputs,
        gains=gains,
        psd=psd,
        clamp_fraction=clamp_count / float(n_frames * n_bins),
        num_frames=n_frames,
        num_bins=n_bins,
    )


def enhance(samples: np.ndarray, scene: ArrayScene, mode: str, tau: float,
            **kwargs) -> np.ndarray:
    """Convenience wrapper returning the mono output of a single filter mode."""
    if mode not in beamformer.MODES:
        raise InvalidConfig(f"unknown mode {mode!r}, expected one of {beamformer.MODES}")
    return enhance_all(samples, scene, tau, **kwargs).outputs[mode]
