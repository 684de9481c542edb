"""Multichannel speech enhancement via eigenspace PSD tracking.

Estimates time-varying target and diffuse power spectral densities per STFT
bin from the generalized eigenvalue decomposition of a recursively averaged
microphone correlation matrix (temporally smooth eigenvalues, or
instantaneous ones derived from generalized principal components) and applies
them in an MVDR beamformer followed by a Wiener spectral gain.
"""

from ._backend import NUMBA_ENABLED
from .beamformer import MODES, BeamformerWeights, apply, mvdr, mwf_gain
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    EigenpsdError,
    FormatError,
    InvalidConfig,
    InvalidOrder,
    InvalidTau,
    LengthMismatch,
    NoConvergence,
    NotPositiveDefinite,
    SingularMatrix,
)
from .linalg import GevdResult, HermitianMatrix, cholesky, eigh, gevd
from .metrics import MetricReport, cepstral_distance, fw_seg_sir
from .pipeline import EnhanceResult, enhance, enhance_all
from .simulate import (
    Scenario,
    ScenarioSpec,
    mix_at_snr,
    render_diffuse_noise,
    render_source,
    simulate_scenario,
    speech_shaped_source,
)
from .spatial import ArrayScene, CoherenceModel, diffuse_coherence, steering_retf
from .stft import Spectrogram, StftConfig, analyze, synthesize
from .tracker import (
    EigenTracks,
    PsdEstimate,
    TrackerState,
    forgetting_factor,
    instantaneous_eigs,
    psd_from_eigs,
    smooth_eigs,
    update,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "MODES",
    "ArrayScene",
    "BeamformerWeights",
    "CoherenceModel",
    "DegenerateInput",
    "DimensionMismatch",
    "EigenpsdError",
    "EigenTracks",
    "EnhanceResult",
    "FormatError",
    "GevdResult",
    "HermitianMatrix",
    "InvalidConfig",
    "InvalidOrder",
    "InvalidTau",
    "LengthMismatch",
    "MetricReport",
    "NoConvergence",
    "NotPositiveDefinite",
    "PsdEstimate",
    "Scenario",
    "ScenarioSpec",
    "SingularMatrix",
    "Spectrogram",
    "StftConfig",
    "TrackerState",
    "analyze",
    "apply",
    "cepstral_distance",
    "cholesky",
    "diffuse_coherence",
    "eigh",
    "enhance",
    "enhance_all",
    "forgetting_factor",
    "fw_seg_sir",
    "gevd",
    "instantaneous_eigs",
    "mix_at_snr",
    "mvdr",
    "mwf_gain",
    "psd_from_eigs",
    "render_diffuse_noise",
    "render_source",
    "simulate_scenario",
    "smooth_eigs",
    "speech_shaped_source",
    "steering_retf",
    "synthesize",
    "update",
]
