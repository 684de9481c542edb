"""Per-bin correlation tracking and eigenvalue-based PSD estimation.

The microphone correlation matrix is tracked by exponential recursive
averaging with forgetting factor zeta = exp(-hop / (sample_rate * tau)). Its
GEVD against the diffuse coherence matrix yields temporally smooth
generalized eigenvalues; projecting the current frame onto the generalized
eigenvectors yields principal components whose squared moduli act as
instantaneous eigenvalues. Either eigenvalue vector maps to a pair of PSD
estimates (phi_s for the coherent target, phi_d for the diffuse component):
phi_d is the mean of the M-1 trailing eigenvalues, the dominant eigenvalue
minus phi_d isolates the rank-one target power, and a least-squares fit
against the steering vector converts it to the PSD at the reference mic.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidOrder, InvalidTau

DEFAULT_INIT_SCALE = 1e-6


def forgetting_factor(tau: float, hop: int, sample_rate: float) -> float:
    """Exponential-averaging weight zeta = exp(-hop / (sample_rate * tau))."""
    if not tau > 0:
        raise InvalidTau(f"time constant must be positive, got {tau}")
    return float(np.exp(-hop / (sample_rate * tau)))


@dataclass(frozen=True)
class TrackerState:
    """Recursively averaged correlation matrix for one frequency bin."""

    psi: np.ndarray  # (M, M) complex Hermitian
    zeta: float
    frame: int = 0

    def __post_init__(self):
        if not 0.0 <= self.zeta < 1.0:
            raise InvalidTau(f"forgetting factor must lie in [0, 1), got {self.zeta}")

    @classmethod
    def initial(cls, gamma, zeta: float, *, init_scale: float = DEFAULT_INIT_SCALE) -> "TrackerState":
        """Start from a small multiple of gamma so the first GEVDs are well posed."""
        g = linalg._as_matrix(gamma)
        return cls(psi=init_scale * g, zeta=zeta, frame=0)


@dataclass(frozen=True)
class PsdEstimate:
    """Nonnegative per-bin power estimates for one frame."""

    phi_s: float  # target PSD at the reference microphone
    phi_d: float  # diffuse-component PSD
    lambda_xe1: float  # dominant eigenvalue after diffuse-floor removal


@dataclass(frozen=True)
class EigenTracks:
    """Eigenvalue tracks of one bin: smooth, optional instantaneous, basis."""

    smooth: np.ndarray  # (M,) real, descending
    eigenvectors: np.ndarray  # (M, M) complex, gamma-orthonormal
    instantaneous: np.ndarray | None = None  # (M,) real, order follows eigenvectors


def update(state: TrackerState, y: np.ndarray) -> TrackerState:
    """One recursion step: psi <- zeta psi + (1 - zeta) y y^H."""
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1 or y.shape[0] != state.psi.shape[0]:
        raise DimensionMismatch(f"frame shape {y.shape} vs state dim {state.psi.shape[0]}")
    from . import _kernels as _k

    psi = _k.rank_one_update(np.ascontiguousarray(state.psi), y, state.zeta)
    return TrackerState(psi=psi, zeta=state.zeta, frame=state.frame + 1)


def smooth_eigs(state: TrackerState, gamma) -> EigenTracks:
    """GEVD of the tracked correlation matrix against the diffuse coherence."""
    res = linalg.gevd(state.psi, gamma)
    return EigenTracks(smooth=res.eigenvalues, eigenvectors=res.eigenvectors)


def instantaneous_eigs(p_hat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Squared moduli of the generalized principal components |p_m^H y|^2."""
    p_hat = np.asarray(p_hat, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if p_hat.ndim != 2 or y.ndim != 1 or p_hat.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"eigenvector shape {p_hat.shape} vs frame {y.shape}")
    comps = p_hat.conj().T @ y
    return np.abs(comps) ** 2


def psd_from_eigs(lam: np.ndarray, p1: np.ndarray, gamma, h: np.ndarray,
                  *, require_sorted: bool = True) -> PsdEstimate:
    """Map generalized eigenvalues and the dominant eigenvector to PSDs.

    phi_d is the mean of lam[1:]; the excess of lam[0] over phi_d is the
    rank-one target eigenvalue (clamped at zero if the frame-wise estimate
    dips negative, which can happen for instantaneous eigenvalues); phi_s
    projects it onto the steering vector: lam_xe1 * |h^H gamma p1 / h^H h|^2.

    With smooth eigenvalues lam must be descending (pass require_sorted=False
    for instantaneous eigenvalues, whose order follows the eigenvector basis).
    """
    lam = np.asarray(lam, dtype=np.float64)
    if lam.ndim != 1 or lam.shape[0] < 2:
        raise DimensionMismatch(f"need at least 2 eigenvalues, got shape {lam.shape}")
    if require_sorted and np.any(np.diff(lam) > 0):
        raise InvalidOrder("eigenvalues must be sorted descending")
    g = linalg._as_matrix(gamma)
    p1 = np.asarray(p1, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if p1.shape != h.shape or p1.shape[0] != g.shape[0]:
        raise DimensionMismatch(
            f"shapes disagree: p1 {p1.shape}, h {h.shape}, gamma {g.shape}"
        )
    phi_d = float(np.mean(lam[1:]))
    lambda_xe1 = float(lam[0] - phi_d)
    if lambda_xe1 < 0.0:
        lambda_xe1 = 0.0
    h_norm_sq = float(np.real(np.vdot(h, h)))
    proj = abs(np.vdot(h, g @ p1)) ** 2 / (h_norm_sq * h_norm_sq)
    return PsdEstimate(phi_s=lambda_xe1 * proj, phi_d=phi_d, lambda_xe1=lambda_xe1)
