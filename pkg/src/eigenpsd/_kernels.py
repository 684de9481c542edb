"""Hot numerical kernels: complex Hermitian factorizations and the per-bin
tracking loop.

Every function here is numba ``@njit``-compiled unless the numpy fallback is
selected (see ``_backend``). Kernels never raise; they report failure through
status flags that the wrapping modules translate into typed exceptions.

Status codes: 0 ok, 1 nonpositive pivot, 2 eigensolver did not converge,
3 zero pivot in a triangular solve.
"""

import numpy as np

from ._backend import kernel

STATUS_OK = 0
STATUS_NOT_PD = 1
STATUS_NO_CONVERGENCE = 2
STATUS_SINGULAR = 3


@kernel
def cholesky_lower(a):
    """Lower Cholesky factor of a Hermitian matrix: a = L L^H.

    Returns (L, status). The diagonal of L is real positive; status is
    STATUS_NOT_PD as soon as a pivot <= 0 appears.
    """
    n = a.shape[0]
    L = np.zeros((n, n), np.complex128)
    for j in range(n):
        s = a[j, j].real
        for k in range(j):
            s -= (L[j, k] * L[j, k].conjugate()).real
        if s <= 0.0:
            return L, STATUS_NOT_PD
        d = np.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, n):
            t = a[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k].conjugate()
            L[i, j] = t / d
    return L, STATUS_OK


@kernel
def solve_lower_matrix(L, b):
    """Forward substitution L x = b for each column of b. Returns (x, status)."""
    n = L.shape[0]
    m = b.shape[1]
    x = np.zeros((n, m), np.complex128)
    for j in range(m):
        for i in range(n):
            piv = L[i, i]
            if piv == 0.0:
                return x, STATUS_SINGULAR
            t = b[i, j]
            for k in range(i):
                t -= L[i, k] * x[k, j]
            x[i, j] = t / piv
    return x, STATUS_OK


@kernel
def solve_lower_herm_matrix(L, b):
    """Back substitution L^H x = b for each column of b. Returns (x, status)."""
    n = L.shape[0]
    m = b.shape[1]
    x = np.zeros((n, m), np.complex128)
    for j in range(m):
        for i in range(n - 1, -1, -1):
            piv = L[i, i].conjugate()
            if piv == 0.0:
                return x, STATUS_SINGULAR
            t = b[i, j]
            for k in range(i + 1, n):
                t -= L[k, i].conjugate() * x[k, j]
            x[i, j] = t / piv
    return x, STATUS_OK


@kernel
def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Returns (eigenvalues, eigenvectors, status) with eigenvalues sorted
    descending (stable in the original index on ties) and each eigenvector
    column rotated so its largest-modulus entry is real positive.
    Convergence: off-diagonal Frobenius mass <= tol * ||a||_F.
    """
    n = a.shape[0]
    A = a.copy()
    U = np.zeros((n, n), np.complex128)
    for i in range(n):
        U[i, i] = 1.0
    anorm = 0.0
    for i in range(n):
        for j in range(n):
            anorm += (A[i, j] * A[i, j].conjugate()).real
    anorm = np.sqrt(anorm)

    converged = anorm == 0.0
    for _ in range(max_sweeps):
        if converged:
            break
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += (A[i, j] * A[i, j].conjugate()).real
        if np.sqrt(off) <= tol * anorm:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                aab = abs(apq)
                if aab == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * aab)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / aab
                # Rotate columns p, q; restore rows from Hermitian symmetry.
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * ph.conjugate() * akq
                    A[k, q] = s * ph * akp + c * akq
                    A[p, k] = A[k, p].conjugate()
                    A[q, k] = A[k, q].conjugate()
                A[p, p] = app - t * aab
                A[q, q] = aqq + t * aab
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    ukp = U[k, p]
                    ukq = U[k, q]
                    U[k, p] = c * ukp - s * ph.conjugate() * ukq
                    U[k, q] = s * ph * ukp + c * ukq
    # Final convergence check covers the case where the last sweep finished
    # the job but the loop ran out before re-testing.
    if not converged:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += (A[i, j] * A[i, j].conjugate()).real
        converged = np.sqrt(off) <= tol * anorm

    lam = np.empty(n, np.float64)
    for i in range(n):
        lam[i] = A[i, i].real

    # Stable insertion sort into descending order (ties keep original index).
    order = np.empty(n, np.int64)
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        key = order[i]
        kv = lam[key]
        j = i - 1
        while j >= 0 and lam[order[j]] < kv:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key

    lam_sorted = np.empty(n, np.float64)
    u_sorted = np.empty((n, n), np.complex128)
    for i in range(n):
        lam_sorted[i] = lam[order[i]]
        for r in range(n):
            u_sorted[r, i] = U[r, order[i]]

    # Deterministic column phase: largest-modulus entry made real positive.
    for j in range(n):
        best = 0
        bv = 0.0
        for r in range(n):
            m = abs(u_sorted[r, j])
            if m > bv:
                bv = m
                best = r
        if bv > 0.0:
            rot = u_sorted[best, j].conjugate() / bv
            for r in range(n):
                u_sorted[r, j] = u_sorted[r, j] * rot

    status = STATUS_OK if converged else STATUS_NO_CONVERGENCE
    return lam_sorted, u_sorted, status


@kernel
def gevd_with_chol(psi, L, tol, max_sweeps):
    """GEVD of (psi, gamma) given L = cholesky(gamma).

    Whitens psi to W = L^-1 psi L^-H, diagonalizes W with Jacobi, and maps
    the eigenvectors back through P = L^-H U, so P^H gamma P = I.
    Returns (eigenvalues descending, P, status).
    """
    n = psi.shape[0]
    x, st = solve_lower_matrix(L, psi)  # x = L^-1 psi
    if st != STATUS_OK:
        return np.zeros(n, np.float64), np.zeros((n, n), np.complex128), st
    xh = np.empty((n, n), np.complex128)
    for i in range(n):
        for j in range(n):
            xh[i, j] = x[j, i].conjugate()
    y, st = solve_lower_matrix(L, xh)  # y = L^-1 x^H, so W = y^H
    if st != STATUS_OK:
        return np.zeros(n, np.float64), np.zeros((n, n), np.complex128), st
    w = np.empty((n, n), np.complex128)
    for i in range(n):
        for j in range(i + 1):
            # Exact Hermitian average of y^H and its conjugate transpose.
            v = 0.5 * (y[j, i].conjugate() + y[i, j])
            if i == j:
                w[i, i] = v.real
            else:
                w[i, j] = v
                w[j, i] = v.conjugate()
    lam, u, st = jacobi_eigh(w, tol, max_sweeps)
    if st != STATUS_OK:
        return lam, u, st
    p, st = solve_lower_herm_matrix(L, u)
    return lam, p, st


@kernel
def rank_one_update(psi, y, zeta):
    """psi <- zeta * psi + (1 - zeta) * y y^H, kept exactly Hermitian."""
    n = psi.shape[0]
    out = np.empty((n, n), np.complex128)
    for i in range(n):
        out[i, i] = zeta * psi[i, i].real + (1.0 - zeta) * (y[i] * y[i].conjugate()).real
        for j in range(i):
            v = zeta * psi[i, j] + (1.0 - zeta) * y[i] * y[j].conjugate()
            out[i, j] = v
            out[j, i] = v.conjugate()
    return out


@kernel
def tracked_enhance(spec, gammas, chols, gamma_h, h_norm_sq, h_gamma_inv_h,
                    w_mvdr, zeta, init_scale, tol, max_sweeps, hybrid_diffuse):
    """Frame-major tracking loop over an (L, K, M) spectrogram.

    Per frame and bin: recursive correlation update, GEVD against the diffuse
    coherence, eigenvalue-based PSD estimates (smooth and instantaneous), and
    the Wiener spectral gains. The MVDR output and the two gain fields are
    returned so the caller can assemble any filter mode.

    Returns (out_mvdr (L,K), gains (2,L,K) [smooth, instantaneous],
    psd (4,L,K) [phi_s_sm, phi_d_sm, phi_s_inst, phi_d_inst],
    clamp_count, status).
    """
    n_frames, n_bins, m = spec.shape
    out_mvdr = np.zeros((n_frames, n_bins), np.complex128)
    gains = np.zeros((2, n_frames, n_bins), np.float64)
    psd = np.zeros((4, n_frames, n_bins), np.float64)
    clamp_count = 0

    psi = np.empty((n_bins, m, m), np.complex128)
    for k in range(n_bins):
        for i in range(m):
            for j in range(m):
                psi[k, i, j] = init_scale * gammas[k, i, j]

    y = np.empty(m, np.complex128)
    for l in range(n_frames):
        for k in range(n_bins):
            for i in range(m):
                y[i] = spec[l, k, i]
            psi[k] = rank_one_update(psi[k], y, zeta)

            lam, p, st = gevd_with_chol(psi[k], chols[k], tol, max_sweeps)
            if st != STATUS_OK:
                return out_mvdr, gains, psd, clamp_count, st

            # Smooth estimates: diffuse PSD = mean of the M-1 smallest
            # eigenvalues, speech PSD from the dominant eigenpair.
            acc = 0.0
            for i in range(1, m):
                acc += lam[i]
            phi_d_sm = acc / (m - 1)
            lam_xe_sm = lam[0] - phi_d_sm
            if lam_xe_sm < 0.0:
                lam_xe_sm = 0.0
            num = 0.0 + 0.0j
            for i in range(m):
                num += gamma_h[k, i].conjugate() * p[i, 0]
            proj = (num * num.conjugate()).real / (h_norm_sq[k] * h_norm_sq[k])
            phi_s_sm = lam_xe_sm * proj

            # Instantaneous estimates from the principal components p^H y,
            # keeping the eigenvector ordering of the smooth decomposition.
            lam_inst = np.empty(m, np.float64)
            for i in range(m):
                t = 0.0 + 0.0j
                for r in range(m):
                    t += p[r, i].conjugate() * y[r]
                lam_inst[i] = (t * t.conjugate()).real
            acc = 0.0
            for i in range(1, m):
                acc += lam_inst[i]
            phi_d_inst = acc / (m - 1)
            phi_d_for_speech = phi_d_sm if hybrid_diffuse else phi_d_inst
            lam_xe_inst = lam_inst[0] - phi_d_for_speech
            if lam_xe_inst < 0.0:
                lam_xe_inst = 0.0
                clamp_count += 1
            phi_s_inst = lam_xe_inst * proj

            # Wiener gain on the beamformer output: the diffuse power left
            # after the MVDR is phi_d / (h^H gamma^-1 h).
            g_sm = 0.0
            g_num = phi_s_sm * h_gamma_inv_h[k]
            g_den = g_num + phi_d_sm
            if g_den > 0.0:
                g_sm = g_num / g_den
            g_inst = 0.0
            g_num = phi_s_inst * h_gamma_inv_h[k]
            g_den = g_num + phi_d_inst
            if g_den > 0.0:
                g_inst = g_num / g_den

            z = 0.0 + 0.0j
            for i in range(m):
                z += w_mvdr[k, i].conjugate() * y[i]
            out_mvdr[l, k] = z
            gains[0, l, k] = g_sm
            gains[1, l, k] = g_inst
            psd[0, l, k] = phi_s_sm
            psd[1, l, k] = phi_d_sm
            psd[2, l, k] = phi_s_inst
            psd[3, l, k] = phi_d_inst

    return out_mvdr, gains, psd, clamp_count, STATUS_OK
