import numpy as np


def random_hermitian_pd(rng, m, *, scale=1.0):
    """Well-conditioned random Hermitian positive-definite matrix."""
    b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return scale * (b @ b.conj().T / m + 0.5 * np.eye(m))


def random_hermitian(rng, m):
    b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return 0.5 * (b + b.conj().T)


def random_steering(rng, m):
    """Unit-modulus steering vector with h[0] = 1."""
    h = np.exp(1j * rng.uniform(-np.pi, np.pi, m))
    h[0] = 1.0
    return h
