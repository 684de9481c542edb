"""Self-contained complex Hermitian linear algebra.

Provides the Cholesky factorization, a cyclic-Jacobi Hermitian
eigendecomposition, and the generalized eigenvalue decomposition (GEVD) of a
matrix pair (psi, gamma) with gamma positive definite. The GEVD is computed
by whitening: L = cholesky(gamma), W = L^-1 psi L^-H, (lam, U) = eigh(W),
P = L^-H U, which normalizes the eigenvectors so that P^H gamma P = I.

Matrices here are small (microphone count, M <= ~16); the kernels favor
stability and determinism over blocked performance.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotPositiveDefinite,
    SingularMatrix,
)

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class HermitianMatrix:
    """Complex Hermitian matrix with the equality A == A^H enforced structurally.

    Only the lower triangle of the input is authoritative: the dense form is
    materialized by mirroring it and taking the real part of the diagonal, so
    the Hermitian property holds exactly (not merely within round-off). The
    dense array is frozen after construction.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.complex128, order="C")
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a.view(np.float64))):
            raise ValueError("matrix entries must be finite")
        lower = np.tril(a, -1)
        self._a = lower + lower.conj().T + np.diag(a.diagonal().real)
        self._a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def dense(self) -> np.ndarray:
        """Read-only dense array; A == A.conj().T exactly."""
        return self._a

    def __array__(self, dtype=None, copy=None):
        if dtype is not None and dtype != self._a.dtype:
            return self._a.astype(dtype)
        return self._a

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"


@dataclass(frozen=True)
class GevdResult:
    """Generalized eigenvalues (descending) and gamma-orthonormal eigenvectors."""

    eigenvalues: np.ndarray  # real, shape (M,), descending
    eigenvectors: np.ndarray  # complex, shape (M, M); P^H gamma P = I


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, HermitianMatrix):
        return a.dense
    return HermitianMatrix(a).dense


def cholesky(a) -> np.ndarray:
    """Lower-triangular L with a = L L^H and a real positive diagonal.

    Raises NotPositiveDefinite on a nonpositive pivot, which signals that the
    matrix needs diagonal loading.
    """
    m = _as_matrix(a)
    L, status = _k.cholesky_lower(m)
    if status != _k.STATUS_OK:
        raise NotPositiveDefinite("matrix is not positive definite (pivot <= 0)")
    return L


def eigh(a, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with real eigenvalues sorted
    descending (stable on ties) and a unitary eigenvector matrix whose
    columns are phase-fixed (largest-modulus entry real positive).
    """
    m = _as_matrix(a)
    lam, u, status = _k.jacobi_eigh(m, tol, max_sweeps)
    if status != _k.STATUS_OK:
        raise NoConvergence(f"Jacobi sweep cap ({max_sweeps}) exceeded")
    return lam, u


def gevd(psi, gamma, *, tol: float = JACOBI_TOL,
         max_sweeps: int = JACOBI_MAX_SWEEPS) -> GevdResult:
    """GEVD of the pair (psi, gamma): psi P = gamma P diag(lam), P^H gamma P = I."""
    mp = _as_matrix(psi)
    mg = _as_matrix(gamma)
    if mp.shape != mg.shape:
        raise DimensionMismatch(f"psi {mp.shape} vs gamma {mg.shape}")
    L, status = _k.cholesky_lower(mg)
    if status != _k.STATUS_OK:
        raise NotPositiveDefinite("gamma is not positive definite (pivot <= 0)")
    lam, p, status = _k.gevd_with_chol(mp, L, tol, max_sweeps)
    if status == _k.STATUS_NO_CONVERGENCE:
        raise NoConvergence(f"Jacobi sweep cap ({max_sweeps}) exceeded")
    if status != _k.STATUS_OK:
        raise SingularMatrix("zero pivot while mapping eigenvectors back")
    return GevdResult(eigenvalues=lam, eigenvectors=p)


def solve_lower(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve l x = b by forward substitution; l lower-triangular."""
    l = np.ascontiguousarray(l, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    vector = b.ndim == 1
    bm = np.ascontiguousarray(b[:, None] if vector else b)
    if l.shape[0] != l.shape[1] or l.shape[0] != bm.shape[0]:
        raise DimensionMismatch(f"l {l.shape} vs b {b.shape}")
    x, status = _k.solve_lower_matrix(l, bm)
    if status != _k.STATUS_OK:
        raise SingularMatrix("zero pivot in forward substitution")
    return x[:, 0] if vector else x


def hermitian_inverse_apply(gamma, h: np.ndarray) -> np.ndarray:
    """Return gamma^-1 h for positive-definite gamma via its Cholesky factor."""
    mg = _as_matrix(gamma)
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 1 or h.shape[0] != mg.shape[0]:
        raise DimensionMismatch(f"gamma {mg.shape} vs h {h.shape}")
    L = cholesky(mg)
    t, status = _k.solve_lower_matrix(L, np.ascontiguousarray(h[:, None]))
    if status != _k.STATUS_OK:
        raise SingularMatrix("zero pivot in forward substitution")
    x, status = _k.solve_lower_herm_matrix(L, t)
    if status != _k.STATUS_OK:
        raise SingularMatrix("zero pivot in back substitution")
    return x[:, 0]
