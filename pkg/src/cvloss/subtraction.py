"""Single-photon subtraction from Gaussian states and its interplay with loss.

The Wigner function of a single-photon-subtracted Gaussian state, before or
after a loss channel, belongs to one closed family

    W(beta) = (1/2) [ (beta, M beta) + c ] * G_Sigma(beta),

with G_Sigma the normalized zero-mean Gaussian of covariance Sigma,
M = Sigma^{-1} A Sigma^{-1} and c = 2 - tr(Sigma^{-1} A).  The rank-two
matrix A carries all non-Gaussian structure.  Marginals and quadrature
moments close over this family, so everything here is evaluated in closed
form; numerical quadrature appears only in the test suite as an oracle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import VacuumSubtraction
from .loss_channel import _as_generator, drifted_mode
from .phase_space import (
    GaussianState,
    as_mode,
    mode_projector,
    symplectic_form,
    validate_covariance,
)

SUBTRACTION_EPS = 1e-12
PSD_TOL = 1e-10
WITNESS_THRESHOLD = 2.0


@dataclass(frozen=True)
class PolyGaussianWigner:
    """Quadratic-times-Gaussian Wigner function over k modes.

    Normalization requires tr(M Sigma) + c = 2; this is checked on
    construction and preserved by marginalization.
    """

    sigma: np.ndarray = field(repr=False)
    M: np.ndarray = field(repr=False)
    c: float

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        M = np.asarray(self.M, dtype=float)
        if sigma.shape != M.shape or sigma.ndim != 2 or sigma.shape[0] % 2 != 0:
            raise ValueError("sigma and M must be square matrices of equal even dimension")
        if np.linalg.eigvalsh((M + M.T) / 2.0)[0] < -PSD_TOL:
            raise ValueError("quadratic coefficient M must be positive semidefinite")
        norm = np.trace(M @ sigma) + self.c
        if abs(norm - 2.0) > 1e-8:
            raise ValueError(f"unnormalized Wigner family: tr(M Sigma) + c = {norm!r}")
        sigma.setflags(write=False)
        M.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "M", M)

    @property
    def k(self):
        """Number of retained modes."""
        return self.sigma.shape[0] // 2

    def __call__(self, beta):
        """Evaluate W at one point (length 2k) or a batch (N x 2k)."""
        beta = np.asarray(beta, dtype=float)
        single = beta.ndim == 1
        pts = np.atleast_2d(beta)
        if pts.shape[1] != 2 * self.k:
            raise ValueError(f"points must have dimension {2 * self.k}")
        sig_inv_b = np.linalg.solve(self.sigma, pts.T).T
        gauss = np.exp(-0.5 * np.sum(pts * sig_inv_b, axis=1))
        gauss /= (2.0 * np.pi) ** self.k * np.sqrt(np.linalg.det(self.sigma))
        quad = np.sum(pts * (pts @ self.M), axis=1)
        out = 0.5 * (quad + self.c) * gauss
        return float(out[0]) if single else out


def _poly_gaussian_from_base(V, A):
    """Assemble the Wigner family for base covariance V and excess matrix A."""
    Vinv_A = np.linalg.solve(V, A)
    M = np.linalg.solve(V, Vinv_A.T).T  # V^{-1} A V^{-1}, symmetric up to roundoff
    M = (M + M.T) / 2.0
    c = 2.0 - float(np.trace(Vinv_A))
    return PolyGaussianWigner(sigma=V.copy(), M=M, c=c)


@dataclass(frozen=True)
class SubtractedState:
    """Photon-subtracted Gaussian state, possibly after loss.

    ``base`` is the Gaussian the subtraction dresses (the lossy covariance
    when loss acts), ``A`` its rank-two excess matrix and ``sub_mode`` the
    effective subtraction mode.  ``pre_mode`` and the decay matrices record
    how the state was produced so both forms of the negativity witness can be
    evaluated; for subtraction from an already-lossy state they are trivial.
    """

    base: GaussianState
    A: np.ndarray = field(repr=False)
    sub_mode: np.ndarray = field(repr=False)
    pre_mode: np.ndarray = field(repr=False)
    decay_minus: np.ndarray = field(repr=False)
    decay_plus: np.ndarray = field(repr=False)
    wigner: PolyGaussianWigner = None

    def __post_init__(self):
        for arr in (self.A, self.sub_mode, self.pre_mode, self.decay_minus, self.decay_plus):
            np.asarray(arr).setflags(write=False)
        if self.wigner is None:
            object.__setattr__(
                self, "wigner", _poly_gaussian_from_base(self.base.V, self.A)
            )

    @property
    def m(self):
        return self.base.m


def subtraction_matrix(state, g):
    """Rank-two excess matrix of the photon-subtracted Gaussian state.

    A = 2 (V-1) Pi (V-1) / tr{(V-1) Pi} with Pi the projector onto the
    subtraction-mode plane.  Raises VacuumSubtraction when mode g holds
    vacuum (the heralding probability vanishes).
    """
    g = as_mode(g, state.m)
    Pi = mode_projector(g)
    Vm1 = state.V - np.eye(2 * state.m)
    den = float(np.trace(Vm1 @ Pi))
    if den <= SUBTRACTION_EPS:
        raise VacuumSubtraction(
            f"subtraction mode holds vacuum (variance excess {den!r}); "
            "the conditioned state is undefined"
        )
    A = 2.0 * Vm1 @ Pi @ Vm1 / den
    return (A + A.T) / 2.0


def subtract_then_lose(state, g, channel, xi):
    """Subtract one photon in mode g, then apply the loss channel of strength xi.

    Returns the lossy base covariance, the decayed excess matrix
    e^{-xi D} A e^{-xi D} and the drifted subtraction mode.
    """
    gen = _as_generator(channel)
    if state.m != gen.m:
        raise ValueError("state and channel mode counts differ")
    g = as_mode(g, state.m)
    A = subtraction_matrix(state, g)
    Em = gen.decay(xi, -1)
    Ep = gen.decay(xi, +1)
    V_xi = validate_covariance(Em @ state.V @ Em + gen.vacuum_infusion(xi))
    A_xi = Em @ A @ Em
    g_tilde, _ = drifted_mode(g, gen, xi)
    return SubtractedState(
        base=V_xi,
        A=(A_xi + A_xi.T) / 2.0,
        sub_mode=g_tilde,
        pre_mode=g,
        decay_minus=Em,
        decay_plus=Ep,
    )


def lose_then_subtract(state, channel, xi, g):
    """Apply the loss channel first, then subtract one photon in mode g.

    Equivalent to subtracting directly from the lossy Gaussian: the excess
    matrix is rebuilt from the lossy covariance and the mode stays g.  Can
    raise VacuumSubtraction even when the opposite order succeeds, e.g. when
    the losses empty mode g first.
    """
    gen = _as_generator(channel)
    if state.m != gen.m:
        raise ValueError("state and channel mode counts differ")
    g = as_mode(g, state.m)
    Em = gen.decay(xi, -1)
    V_xi = validate_covariance(Em @ state.V @ Em + gen.vacuum_infusion(xi))
    A = subtraction_matrix(V_xi, g)
    eye = np.eye(2 * state.m)
    return SubtractedState(
        base=V_xi,
        A=A,
        sub_mode=g,
        pre_mode=g,
        decay_minus=eye,
        decay_plus=eye,
    )


def wigner_eval(s, beta):
    """Evaluate the state's Wigner function at phase-space point(s) beta."""
    return s.wigner(beta) if isinstance(s, SubtractedState) else s(beta)


@dataclass(frozen=True)
class WitnessResult:
    """Both forms of the Wigner-negativity condition.

    ``lhs > rhs`` (the trace form, threshold 2) is necessary and sufficient
    for the Wigner function to take negative values.  ``quad_lhs > quad_rhs``
    is the equivalent quadratic-form condition on the subtraction mode; the
    two margins differ by the exact positive factor 2 / pair_variance_excess.
    """

    lhs: float
    rhs: float
    negative: bool
    quad_lhs: float
    quad_rhs: float
    pair_variance_excess: float

    def trace_margin_from_quad(self):
        """Trace-form margin rebuilt from the quadratic form (consistency bridge)."""
        return 2.0 * (self.quad_lhs - self.quad_rhs) / self.pair_variance_excess


def negativity_witness(s):
    """Evaluate the negativity condition for a (lossy) subtracted state."""
    V = s.base.V
    lhs = float(np.trace(np.linalg.solve(V, s.A)))
    J = symplectic_form(s.m)
    vecs = (s.decay_plus @ s.pre_mode, s.decay_plus @ (J @ s.pre_mode))
    quad_lhs = sum(float(w @ np.linalg.solve(V, w)) for w in vecs)
    quad_rhs = sum(float(w @ w) for w in vecs)
    den = sum(float(w @ (V - np.eye(2 * s.m)) @ w) for w in vecs)
    return WitnessResult(
        lhs=lhs,
        rhs=WITNESS_THRESHOLD,
        negative=bool(lhs > WITNESS_THRESHOLD),
        quad_lhs=quad_lhs,
        quad_rhs=quad_rhs,
        pair_variance_excess=den,
    )


def _as_wigner(s):
    return s.wigner if isinstance(s, SubtractedState) else s


def marginal(s, keep):
    """Reduced Wigner function over the kept modes (0-based indices).

    The family is closed under marginalization: the reduced state keeps the
    corresponding blocks of Sigma and A, with the constant fixed by
    normalization.
    """
    w = _as_wigner(s)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must be a non-empty set of mode indices")
    if keep[0] < 0 or keep[-1] >= w.k:
        raise ValueError(f"mode indices out of range for {w.k} modes")
    idx = np.array(keep + [k + w.k for k in keep])
    sigma_s = w.sigma[np.ix_(idx, idx)]
    # A = Sigma M Sigma restricted to the kept block
    A_full = w.sigma @ w.M @ w.sigma
    A_s = A_full[np.ix_(idx, idx)]
    Minv_A = np.linalg.solve(sigma_s, A_s)
    M_s = np.linalg.solve(sigma_s, Minv_A.T).T
    M_s = (M_s + M_s.T) / 2.0
    c_s = 2.0 - float(np.trace(Minv_A))
    return PolyGaussianWigner(sigma=sigma_s, M=M_s, c=c_s)


def _marginal_blocks(s, keep):
    """(Sigma_S, A_S) blocks for a kept mode set, without forming M first.

    Used where bit-level stability of untouched blocks matters: when neither
    the covariance nor the excess matrix couples kept and discarded modes,
    the returned blocks are the exact sub-arrays.
    """
    if isinstance(s, SubtractedState):
        sigma, A = s.base.V, s.A
        k_total = s.m
    else:
        sigma, A = s.sigma, s.sigma @ s.M @ s.sigma
        k_total = s.k
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must be a non-empty set of mode indices")
    if keep[0] < 0 or keep[-1] >= k_total:
        raise ValueError(f"mode indices out of range for {k_total} modes")
    idx = np.array(keep + [k + k_total for k in keep])
    return sigma[np.ix_(idx, idx)], A[np.ix_(idx, idx)]


def marginal_of_state(s, keep):
    """Marginal of a SubtractedState taken directly from its (V, A) blocks."""
    sigma_s, A_s = _marginal_blocks(s, keep)
    Minv_A = np.linalg.solve(sigma_s, A_s)
    M_s = np.linalg.solve(sigma_s, Minv_A.T).T
    M_s = (M_s + M_s.T) / 2.0
    c_s = 2.0 - float(np.trace(Minv_A))
    return PolyGaussianWigner(sigma=sigma_s, M=M_s, c=c_s)


def quadrature_moment(s, f, order):
    """Phase-space moment of the quadrature along f, of order 2 or 4.

    Closed-form Wick expansion over the quadratic-times-Gaussian density;
    equals the symmetric-ordered operator moment.  With sig = (f, Sigma f)
    and w = (f, Sigma M Sigma f):

        order 2:  sig + w
        order 4:  3 sig^2 + 6 sig w
    """
    w = _as_wigner(s)
    f = as_mode(f, w.k)
    if order not in (2, 4):
        raise ValueError("only moments of order 2 and 4 are supported")
    sig = float(f @ w.sigma @ f)
    sf = w.sigma @ f
    wexc = float(sf @ w.M @ sf)
    if order == 2:
        return sig + wexc
    return 3.0 * sig * sig + 6.0 * sig * wexc


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def min_excess_kurtosis(s, f, grid_points=360, theta_tol=1e-6):
    """Minimal excess kurtosis over the mode plane of f.

    Scans f_theta = cos(theta) f + sin(theta) Jf on a coarse grid, then
    refines with golden-section search; ties resolve to the smallest theta.
    Returns (kappa_min, theta_star) with theta_star in [0, 2 pi).
    """
    w = _as_wigner(s)
    f = as_mode(f, w.k)
    Jf = symplectic_form(w.k) @ f

    def kappa(theta):
        f_theta = np.cos(theta) * f + np.sin(theta) * Jf
        m2 = quadrature_moment(w, f_theta, 2)
        m4 = quadrature_moment(w, f_theta, 4)
        # (m4 - 3 m2^2) / m2^2 rather than m4/m2^2 - 3: exactly zero for
        # Gaussian inputs instead of zero up to division roundoff
        return (m4 - 3.0 * m2 * m2) / (m2 * m2)

    thetas = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    values = np.array([kappa(t) for t in thetas])
    i0 = int(np.argmin(values))  # argmin takes the first minimum: smallest theta
    step = 2.0 * np.pi / grid_points
    a, b = thetas[i0] - step, thetas[i0] + step
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    k1, k2 = kappa(x1), kappa(x2)
    while b - a > theta_tol:
        if k1 <= k2:
            b, x2, k2 = x2, x1, k1
            x1 = b - _GOLDEN * (b - a)
            k1 = kappa(x1)
        else:
            a, x1, k1 = x1, x2, k2
            x2 = a + _GOLDEN * (b - a)
            k2 = kappa(x2)
    theta_star = ((a + b) / 2.0) % (2.0 * np.pi)
    return kappa(theta_star), theta_star


def drift_subtraction_modes(gs, channel, xi):
    """Per-mode loss drift for an n-photon subtraction pattern.

    The modes need not be orthogonal.  Returns the drifted modes and their
    scale factors |e^{xi D} g_j|: losing after an n-photon subtraction in
    modes g_j equals subtracting in the drifted modes from the lossy state.
    No Wigner function is produced for n >= 2; the statement lives at the
    operator level and is validated in Fock space.
    """
    gen = _as_generator(channel)
    drifted = [drifted_mode(g, gen, xi) for g in gs]
    return [d for d, _ in drifted], [s for _, s in drifted]
