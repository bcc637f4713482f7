"""Gaussian Markovian loss channel built from per-mode Lindblad data.

A channel is a set of orthogonal loss modes h_j with rates gamma_j.  Its
phase-space generator is D = sum_j (gamma_j / 2) (P_hj + P_Jhj); the channel
of strength xi acts on covariances as

    V  ->  e^{-xi D} V e^{-xi D} + (1 - e^{-2 xi D}).

Decay matrices are evaluated from the analytic spectral form
e^{s D} = 1 + sum_j (e^{s gamma_j / 2} - 1)(P_hj + P_Jhj), which is exact for
rank-deficient D and keeps rows outside the loss support exactly untouched.
"""

from dataclasses import dataclass, field

import numpy as np

from .phase_space import (
    GaussianState,
    as_mode,
    mode_projector,
    symplectic_form,
    validate_covariance,
)

MODE_ORTHO_TOL = 1e-10
EIGENVECTOR_TOL = 1e-10


@dataclass(frozen=True)
class LossChannel:
    """Loss modes h_j (normalized, mutually orthogonal) with rates gamma_j >= 0."""

    m: int
    modes: tuple = ()
    gammas: tuple = ()

    def __post_init__(self):
        if len(self.modes) != len(self.gammas):
            raise ValueError("one rate per loss mode required")
        modes = tuple(as_mode(h, self.m) for h in self.modes)
        gammas = tuple(float(g) for g in self.gammas)
        if any(g < 0 for g in gammas):
            raise ValueError("loss rates must be non-negative")
        J = symplectic_form(self.m)
        for i in range(len(modes)):
            for j in range(i + 1, len(modes)):
                if (
                    abs(modes[i] @ modes[j]) > MODE_ORTHO_TOL
                    or abs(modes[i] @ J @ modes[j]) > MODE_ORTHO_TOL
                ):
                    raise ValueError(
                        f"loss modes {i} and {j} are not orthogonal as modes; "
                        "the Lindblad basis must be an orthogonal mode set"
                    )
        for h in modes:
            h.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "gammas", gammas)

    @classmethod
    def single_mode(cls, m, h, gamma):
        return cls(m=m, modes=(np.asarray(h, dtype=float),), gammas=(float(gamma),))

    @classmethod
    def uniform(cls, m, gamma=1.0):
        """Equal loss on every basis mode: D = (gamma / 2) * identity."""
        modes = tuple(np.eye(2 * m)[k] for k in range(m))
        return cls(m=m, modes=modes, gammas=(float(gamma),) * m)


@dataclass(frozen=True)
class DecayGenerator:
    """Generator D with its spectral data cached.

    ``terms`` holds one (rate, projector) pair per loss mode, with
    rate = gamma_j / 2 and projector = P_hj + P_Jhj; everything orthogonal to
    the loss modes sits in the kernel of D.
    """

    m: int
    terms: tuple = ()
    D: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        D = np.zeros((2 * self.m, 2 * self.m))
        for rate, proj in self.terms:
            D = D + rate * proj
        D.setflags(write=False)
        object.__setattr__(self, "D", D)

    def decay(self, xi, sign=-1):
        """e^{sign * xi * D} from the spectral form (sign is +1 or -1)."""
        if xi < 0:
            raise ValueError("loss strength xi must be non-negative")
        if sign not in (-1, +1):
            raise ValueError("sign must be -1 or +1")
        out = np.eye(2 * self.m)
        for rate, proj in self.terms:
            out = out + (np.exp(sign * xi * rate) - 1.0) * proj
        return out

    def vacuum_infusion(self, xi):
        """The additive term 1 - e^{-2 xi D}, assembled without cancellation."""
        if xi < 0:
            raise ValueError("loss strength xi must be non-negative")
        out = np.zeros((2 * self.m, 2 * self.m))
        for rate, proj in self.terms:
            out = out + (1.0 - np.exp(-2.0 * xi * rate)) * proj
        return out


def decay_generator(channel):
    """Build the generator D = sum_j (gamma_j/2)(P_hj + P_Jhj) for a channel."""
    terms = tuple(
        (gamma / 2.0, mode_projector(h))
        for h, gamma in zip(channel.modes, channel.gammas)
    )
    return DecayGenerator(m=channel.m, terms=terms)


def _as_generator(channel_or_gen):
    if isinstance(channel_or_gen, DecayGenerator):
        return channel_or_gen
    return decay_generator(channel_or_gen)


def decay_matrix(gen, xi, sign=-1):
    """Matrix e^{-xi D} (sign=-1, default) or e^{+xi D} (sign=+1)."""
    return _as_generator(gen).decay(xi, sign)


def apply_to_covariance(state, gen, xi):
    """Propagate a Gaussian state through the loss channel of strength xi."""
    gen = _as_generator(gen)
    if state.m != gen.m:
        raise ValueError("state and channel mode counts differ")
    E = gen.decay(xi, -1)
    V_xi = E @ state.V @ E + gen.vacuum_infusion(xi)
    return validate_covariance(V_xi)


def propagate_quadrature(f, gen, xi):
    """Heisenberg image of the quadrature direction f: e^{-xi D} f.

    The vector is deliberately not renormalized; its shrinking norm carries
    the amplitude decay.
    """
    gen = _as_generator(gen)
    f = np.asarray(f, dtype=float)
    return gen.decay(xi, -1) @ f


def drifted_mode(g, gen, xi):
    """Loss-drifted subtraction mode: (e^{xi D} g / |e^{xi D} g|, |e^{xi D} g|).

    Subtracting in g and then losing is the same as losing and then
    subtracting in the drifted mode.  The scale factor is >= 1.
    """
    gen = _as_generator(gen)
    g = as_mode(g, gen.m)
    v = gen.decay(xi, +1) @ g
    scale = float(np.linalg.norm(v))
    return v / scale, scale


def commutes_with_subtraction(g, gen, tol=EIGENVECTOR_TOL):
    """True iff subtraction in mode g commutes with the channel for every xi.

    Holds exactly when g is an eigenvector of D (then span{g, Jg} is
    invariant and the drifted mode equals g).
    """
    gen = _as_generator(gen)
    g = as_mode(g, gen.m)
    Dg = gen.D @ g
    lam = float(g @ Dg)
    return bool(np.linalg.norm(Dg - lam * g) <= tol)


def beamsplitter_transmittances(channel, xi):
    """Per loss mode, the amplitude transmittance t_j = e^{-xi gamma_j / 2}.

    These are the beamsplitter parameters realizing the channel mode by mode,
    and the ones the Fock-space Kraus construction uses.
    """
    if xi < 0:
        raise ValueError("loss strength xi must be non-negative")
    return [(h, float(np.exp(-xi * gamma / 2.0))) for h, gamma in zip(channel.modes, channel.gammas)]
