"""Shared helpers: deterministic random states, channels and basis changes."""

import numpy as np
import pytest

from cvloss import LossChannel, symplectic_form, validate_covariance


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d)).conj()


def random_symplectic_orthogonal(m, rng):
    """Random passive basis change (the real representation of a random unitary)."""
    W = random_unitary(m, rng)
    X, Y = W.real, W.imag
    return np.block([[X, -Y], [Y, X]])


def random_covariance(m, rng, max_squeeze=3.0, max_thermal=1.5):
    """Random physical covariance from its Williamson data."""
    s = rng.uniform(1.0 / max_squeeze, max_squeeze, size=m)
    nu = rng.uniform(1.0, max_thermal, size=m)
    V0 = np.diag(np.concatenate([nu * s, nu / s]))
    O = random_symplectic_orthogonal(m, rng)
    return validate_covariance(O.T @ V0 @ O)


def random_mode(m, rng):
    f = rng.normal(size=2 * m)
    return f / np.linalg.norm(f)


def random_channel(m, rng, max_modes=None, max_gamma=2.0):
    """Loss channel on a random orthogonal mode set with random rates."""
    n_modes = int(rng.integers(1, (max_modes or m) + 1))
    O = random_symplectic_orthogonal(m, rng)
    modes = tuple(O[k] for k in range(n_modes))
    gammas = tuple(rng.uniform(0.1, max_gamma, size=n_modes))
    return LossChannel(m=m, modes=modes, gammas=gammas)


def mode_basis(m):
    return np.eye(2 * m)


def wigner_params_diff(w1, w2):
    """Worst entrywise difference between two poly-Gaussian Wigner functions."""
    return max(
        np.abs(w1.sigma - w2.sigma).max(),
        np.abs(w1.M - w2.M).max(),
        abs(w1.c - w2.c),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
