"""Linear algebra on the 2m-dimensional optical phase space.

Coordinates are ordered (x_1 .. x_m, p_1 .. p_m), dimensionless in vacuum
units: the vacuum covariance matrix is the identity, equivalent to the
commutation relation [x_j, p_k] = 2i delta_jk.  A "mode" is a unit vector f;
its pi/2-shifted partner is Jf.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import UnphysicalCovariance

SYMMETRY_TOL = 1e-12
UNIT_TOL = 1e-12
PHYSICALITY_SLACK = 1e-9
ORTHO_TOL = 1e-10


def symplectic_form(m):
    """Return the 2m x 2m symplectic matrix J with J @ e_j = e_{m+j}.

    J maps the x-block onto the p-block, J^2 = -1 and J^T = -J, so that
    [Q(f1), Q(f2)] = -2i (f1, J f2) reproduces [x_j, p_k] = 2i delta_jk.
    """
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = -np.eye(m)
    J[m:, :m] = np.eye(m)
    return J


def as_phase_vector(f, m=None):
    """Validate and return f as a float vector of even length (2m)."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size % 2 != 0 or f.size == 0:
        raise ValueError(f"phase-space vector must have even length, got shape {f.shape}")
    if m is not None and f.size != 2 * m:
        raise ValueError(f"expected a vector of length {2 * m}, got {f.size}")
    return f


def as_mode(f, m=None, tol=UNIT_TOL):
    """Validate f as a normalized mode vector."""
    f = as_phase_vector(f, m)
    norm = np.linalg.norm(f)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"mode vector must be normalized, got |f| = {norm!r}")
    return f


def commutator_form(f1, f2):
    """Imaginary coefficient of the quadrature commutator.

    [Q(f1), Q(f2)] = i * commutator_form(f1, f2) = -2i (f1, J f2).
    """
    f1 = as_phase_vector(f1)
    f2 = as_phase_vector(f2, f1.size // 2)
    J = symplectic_form(f1.size // 2)
    return -2.0 * float(f1 @ J @ f2)


def mode_projector(f):
    """Rank-2 orthogonal projector onto span{f, Jf} for a normalized mode f."""
    f = as_mode(f)
    Jf = symplectic_form(f.size // 2) @ f
    return np.outer(f, f) + np.outer(Jf, Jf)


def symplectic_eigenvalues(V):
    """Symplectic spectrum of a symmetric positive-definite matrix, sorted ascending.

    Computed as the moduli of the (purely imaginary) eigenvalues of J V,
    one per +/- pair.
    """
    V = np.asarray(V, dtype=float)
    m = V.shape[0] // 2
    ev = np.linalg.eigvals(symplectic_form(m) @ V)
    nus = np.sort(np.abs(ev))
    return nus[::2]  # each value appears as an +/- i nu pair


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state of m modes, held as its covariance matrix.

    Construct through :func:`validate_covariance`; V is symmetrized and
    physicality-checked there and stored read-only.
    """

    m: int
    V: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.V.setflags(write=False)


def validate_covariance(V):
    """Symmetrize V, check physicality, and wrap it as a GaussianState.

    Raises UnphysicalCovariance when V is not positive definite or has a
    symplectic eigenvalue below 1 - 1e-9, and ValueError for shape problems.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise ValueError(f"covariance must be a square matrix, got shape {V.shape}")
    n = V.shape[0]
    if n % 2 != 0 or n == 0:
        raise ValueError(f"covariance must have even dimension, got {n}")
    if not np.allclose(V, V.T, atol=max(SYMMETRY_TOL, SYMMETRY_TOL * np.abs(V).max())):
        raise ValueError("covariance must be symmetric")
    Vs = (V + V.T) / 2.0
    if np.linalg.eigvalsh(Vs)[0] <= 0.0:
        raise UnphysicalCovariance("covariance is not positive definite")
    nu_min = symplectic_eigenvalues(Vs)[0]
    if nu_min < 1.0 - PHYSICALITY_SLACK:
        raise UnphysicalCovariance(
            f"smallest symplectic eigenvalue {nu_min!r} is below the vacuum floor"
        )
    return GaussianState(m=n // 2, V=Vs)


def vacuum_state(m):
    """The m-mode vacuum (identity covariance)."""
    return GaussianState(m=m, V=np.eye(2 * m))


def mean_photon_number(state, f):
    """Mean photon number held by mode f in the given Gaussian state.

    Equals [(f, V f) + (Jf, V Jf) - 2] / 4, which is zero in vacuum.
    """
    f = as_mode(f, state.m)
    J = symplectic_form(state.m)
    Jf = J @ f
    val = (f @ state.V @ f + Jf @ state.V @ Jf - 2.0) / 4.0
    return float(val)


def is_symplectic_orthogonal(O, tol=ORTHO_TOL):
    """True iff O is orthogonal and preserves J (a passive linear-optics map)."""
    O = np.asarray(O, dtype=float)
    if O.ndim != 2 or O.shape[0] != O.shape[1] or O.shape[0] % 2 != 0:
        return False
    n = O.shape[0]
    J = symplectic_form(n // 2)
    return bool(
        np.max(np.abs(O.T @ O - np.eye(n))) <= tol
        and np.max(np.abs(O.T @ J @ O - J)) <= tol
    )
