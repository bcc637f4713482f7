"""Brute-force truncated Fock-space simulator.

Independent ground truth for the analytic machinery: small Gaussian states
are built from explicit (truncated) unitaries, photons are subtracted by
applying annihilation-operator matrices, loss is realized exactly per step
by beamsplitter Kraus families with amplitude transmittance
t_j = e^{-xi gamma_j / 2}, and Wigner values come from displaced parity.

Conventions match the analytic side: x = a + a^dag, p = i(a^dag - a),
vacuum covariance = identity, and the vacuum Wigner value at the origin is
(2 pi)^-m.  Every density matrix carries a truncation monitor: results are
reliable only while the top Fock layer holds less than 1e-6 population.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CutoffLeakage, VacuumSubtraction
from .loss_channel import _as_generator
from .phase_space import as_phase_vector

MAX_CUTOFF = {1: 64, 2: 30, 3: 8}
LEAKAGE_THRESHOLD = 1e-6
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
PSD_SLACK = 1e-8


def _check_dims(m, cutoff):
    if m not in MAX_CUTOFF:
        raise ValueError(f"oracle supports 1 to 3 modes, got m={m}")
    if not 1 <= cutoff <= MAX_CUTOFF[m]:
        raise ValueError(f"cutoff for m={m} must be in [1, {MAX_CUTOFF[m]}], got {cutoff}")


@functools.lru_cache(maxsize=None)
def _ladder(cutoff):
    d = cutoff + 1
    a = np.zeros((d, d))
    a[np.arange(d - 1), np.arange(1, d)] = np.sqrt(np.arange(1, d))
    return a


@functools.lru_cache(maxsize=None)
def _mode_ops(m, cutoff):
    """Per-mode annihilation operators on the full tensor space."""
    d = cutoff + 1
    a1 = _ladder(cutoff)
    ops = []
    for j in range(m):
        factors = [np.eye(d)] * m
        factors[j] = a1
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        ops.append(op.astype(complex))
    return tuple(ops)


@functools.lru_cache(maxsize=None)
def _quadrature_ops(m, cutoff):
    """(x_1..x_m, p_1..p_m) as Hermitian matrices."""
    avec = _mode_ops(m, cutoff)
    xs = [a + a.conj().T for a in avec]
    ps = [1j * (a.conj().T - a) for a in avec]
    return tuple(xs + ps)


@functools.lru_cache(maxsize=None)
def _occupations(m, cutoff):
    """Array of per-mode photon numbers for each tensor basis index."""
    d = cutoff + 1
    grids = np.meshgrid(*([np.arange(d)] * m), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@functools.lru_cache(maxsize=None)
def _parity_vector(m, cutoff):
    tot = _occupations(m, cutoff).sum(axis=1)
    return np.where(tot % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True)
class FockDensityMatrix:
    """Truncated Fock-space density matrix with a leakage monitor."""

    m: int
    cutoff: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dims(self.m, self.cutoff)
        d = (self.cutoff + 1) ** self.m
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (d, d):
            raise ValueError(f"density matrix must have shape {(d, d)}, got {data.shape}")
        scale = max(1.0, float(np.abs(data).max()))
        if np.abs(data - data.conj().T).max() > HERMITICITY_TOL * scale:
            raise ValueError("density matrix is not Hermitian")
        data = (data + data.conj().T) / 2.0
        tr = float(np.trace(data).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace deviates from one by {tr - 1.0!r}")
        data = data / tr
        if np.linalg.eigvalsh(data)[0] < -PSD_SLACK:
            raise ValueError("density matrix is not positive semidefinite")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return (self.cutoff + 1) ** self.m

    @property
    def top_layer_population(self):
        """Population sitting in basis states with some mode at the cutoff."""
        occ = _occupations(self.m, self.cutoff)
        top = np.any(occ == self.cutoff, axis=1)
        return float(np.real(np.diagonal(self.data)[top]).sum())

    @property
    def reliable(self):
        return self.top_layer_population < LEAKAGE_THRESHOLD

    def require_reliable(self):
        if not self.reliable:
            raise CutoffLeakage(
                f"top Fock layer holds {self.top_layer_population:.3e} population "
                f"(threshold {LEAKAGE_THRESHOLD}); raise the cutoff"
            )
        return self


def vacuum(m, cutoff):
    d = (cutoff + 1) ** m
    data = np.zeros((d, d), dtype=complex)
    data[0, 0] = 1.0
    return FockDensityMatrix(m=m, cutoff=cutoff, data=data)


def basis_state(m, cutoff, occupations):
    """|n_1 .. n_m><n_1 .. n_m| for the given per-mode photon numbers."""
    occupations = tuple(int(n) for n in occupations)
    if len(occupations) != m or any(not 0 <= n <= cutoff for n in occupations):
        raise ValueError("occupations must list one photon number per mode, within the cutoff")
    idx = 0
    for n in occupations:
        idx = idx * (cutoff + 1) + n
    d = (cutoff + 1) ** m
    data = np.zeros((d, d), dtype=complex)
    data[idx, idx] = 1.0
    return FockDensityMatrix(m=m, cutoff=cutoff, data=data)


def annihilation_operator(m, cutoff, g):
    """a(g) for an arbitrary (not necessarily normalized) phase-space vector g.

    Linear in g: a(g) = sum_j (g_j - i g_{m+j}) a_j, so a matrix acting on g
    simply reshapes the mode and rescales the operator.
    """
    g = as_phase_vector(g, m)
    avec = _mode_ops(m, cutoff)
    out = np.zeros_like(avec[0])
    for j in range(m):
        out = out + (g[j] - 1j * g[m + j]) * avec[j]
    return out


def _embed_single_mode(m, cutoff, mode, op):
    d = cutoff + 1
    factors = [np.eye(d, dtype=complex)] * m
    factors[mode] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _squeezer(cutoff, s):
    """Single-mode unitary whose vacuum output has <x^2> = s, <p^2> = 1/s."""
    if s <= 0:
        raise ValueError("squeezing factor s must be positive")
    r = -0.5 * np.log(s)
    a = _ladder(cutoff).astype(complex)
    K = (r / 2.0) * (a @ a - a.conj().T @ a.conj().T)
    return scipy.linalg.expm(K)


def _cz_unitary(m, cutoff, i, j):
    """x-x coupling gate whose covariance action is unit adjacency weight."""
    if i == j:
        raise ValueError("coupling gate needs two distinct modes")
    d = cutoff + 1
    a = _ladder(cutoff)
    x = a + a.T
    evals, Q = np.linalg.eigh(x)
    # exp(i x_i x_j / 2) diagonalizes in the product eigenbasis of the two x's
    rot = [np.eye(d, dtype=complex)] * m
    rot[i] = Q.astype(complex)
    rot[j] = Q.astype(complex)
    R = rot[0]
    for f in rot[1:]:
        R = np.kron(R, f)
    occ = _occupations(m, cutoff)
    phase = np.exp(0.5j * evals[occ[:, i]] * evals[occ[:, j]])
    return (R * phase) @ R.conj().T


def _thermal_populations(cutoff, n):
    """Geometric populations of a thermal mode with covariance n * identity."""
    if n < 1.0:
        raise ValueError("thermal covariance parameter n must be >= 1")
    nbar = (n - 1.0) / 2.0
    if nbar == 0.0:
        p = np.zeros(cutoff + 1)
        p[0] = 1.0
        return p
    nu = nbar / (nbar + 1.0)
    p = (1.0 - nu) * nu ** np.arange(cutoff + 1)
    return p / p.sum()


def _inject_thermal(rho_t, m, cutoff, mode, populations):
    """Replace a vacuum product factor at `mode` with a thermal diagonal."""
    d = cutoff + 1
    ket, bra = mode, m + mode
    vac_slice = np.take(np.take(rho_t, 0, axis=bra), 0, axis=ket)
    out = np.zeros_like(rho_t)
    moved = np.moveaxis(out, (ket, bra), (0, 1))
    for k in range(d):
        moved[k, k] = populations[k] * vac_slice
    return out


def build_state(m, cutoff, recipe, strict=True):
    """Assemble a state from squeeze / cz / thermal instructions.

    Each instruction is a tuple: ("squeeze", mode, s) targets covariance
    diag(s, 1/s) on that mode; ("cz", i, j) couples two modes with the x-x
    gate of unit adjacency weight; ("thermal", mode, n) fills a mode that no
    earlier instruction touched with thermal population of covariance
    n * identity.  Raises CutoffLeakage at the end when the result is
    unreliable (pass strict=False to get the flagged state instead).
    """
    _check_dims(m, cutoff)
    d = cutoff + 1
    rho = vacuum(m, cutoff).data.copy()
    touched = set()
    for op in recipe:
        kind = op[0]
        if kind == "squeeze":
            _, mode, s = op
            U = _embed_single_mode(m, cutoff, int(mode), _squeezer(cutoff, float(s)))
            rho = U @ rho @ U.conj().T
            touched.add(int(mode))
        elif kind == "cz":
            _, i, j = op
            U = _cz_unitary(m, cutoff, int(i), int(j))
            rho = U @ rho @ U.conj().T
            touched.update((int(i), int(j)))
        elif kind == "thermal":
            _, mode, n = op
            mode = int(mode)
            if mode in touched:
                raise ValueError(
                    "thermal population can only be injected into a mode no earlier "
                    "instruction has touched"
                )
            rho_t = rho.reshape((d,) * (2 * m))
            rho = _inject_thermal(
                rho_t, m, cutoff, mode, _thermal_populations(cutoff, float(n))
            ).reshape(rho.shape)
            touched.add(mode)
        else:
            raise ValueError(f"unknown recipe instruction {kind!r}")
    state = FockDensityMatrix(m=m, cutoff=cutoff, data=rho)
    if strict:
        state.require_reliable()
    return state


def annihilate(rho, g):
    """Heralded single-photon subtraction in mode g: a(g) rho a(g)^dag, renormalized."""
    op = annihilation_operator(rho.m, rho.cutoff, g)
    new = op @ rho.data @ op.conj().T
    tr = float(np.trace(new).real)
    if tr <= 1e-12:
        raise VacuumSubtraction(
            f"zero-probability subtraction (heralding trace {tr!r})"
        )
    return FockDensityMatrix(m=rho.m, cutoff=rho.cutoff, data=new / tr)


def _single_mode_kraus(cutoff, t):
    """Beamsplitter loss Kraus family for amplitude transmittance t."""
    d = cutoff + 1
    eta = t * t
    if eta >= 1.0:
        return [np.eye(d, dtype=complex)]
    ops = []
    log1m = math.log1p(-eta)
    logeta = math.log(eta) if eta > 0 else -math.inf
    for lost in range(d):
        K = np.zeros((d, d), dtype=complex)
        for n in range(lost, d):
            logc = 0.5 * (
                math.lgamma(n + 1)
                - math.lgamma(lost + 1)
                - math.lgamma(n - lost + 1)
                + lost * log1m
                + (n - lost) * logeta
            )
            K[n - lost, n] = math.exp(logc) if np.isfinite(logc) else 0.0
        ops.append(K)
    return ops


@functools.lru_cache(maxsize=16)
def _mode_rotation(m, cutoff, c_bytes):
    """Passive unitary U with U a_0 U^dag = sum_k conj(c_k) a_k."""
    c = np.frombuffer(c_bytes, dtype=complex)
    cbar = c.conj()
    # complete cbar to a unitary whose first ROW it is: the columns of Q are
    # orthonormal, so the plain transpose (no conjugation) is unitary too
    basis = np.concatenate([cbar[:, None], np.eye(m, dtype=complex)], axis=1)
    Q, _ = np.linalg.qr(basis)
    Q = Q * 1.0
    Q[:, 0] = Q[:, 0] * np.vdot(Q[:, 0], cbar)  # align the QR phase with cbar
    W = Q.T.copy()
    W[0] = cbar
    h = 1j * scipy.linalg.logm(W)
    h = (h + h.conj().T) / 2.0
    avec = _mode_ops(m, cutoff)
    H = np.zeros_like(avec[0])
    for j in range(m):
        for k in range(m):
            H = H + h[j, k] * avec[j].conj().T @ avec[k]
    evals, V = np.linalg.eigh(H)
    return (V * np.exp(1j * evals)) @ V.conj().T


def _apply_axis_kraus(rho_data, m, cutoff, mode, kraus_ops):
    d = cutoff + 1
    rho_t = rho_data.reshape((d,) * (2 * m))
    out = np.zeros_like(rho_t)
    ket, bra = mode, m + mode
    for K in kraus_ops:
        term = np.tensordot(K, rho_t, axes=([1], [ket]))
        term = np.moveaxis(term, 0, ket)
        term = np.tensordot(term, K.conj(), axes=([bra], [1]))
        term = np.moveaxis(term, -1, bra)
        out += term
    return out.reshape(rho_data.shape)


def kraus_loss(rho, channel, xi):
    """Apply the loss channel of strength xi, one beamsplitter per loss mode.

    Loss modes lying on a mode axis get the single-mode Kraus family
    directly; any other mode is first rotated onto axis 0 by a passive
    unitary, damped there, and rotated back.
    """
    if xi < 0:
        raise ValueError("loss strength xi must be non-negative")
    m, cutoff = rho.m, rho.cutoff
    data = rho.data.copy()
    for h, gamma in zip(channel.modes, channel.gammas):
        t = float(np.exp(-xi * gamma / 2.0))
        if t >= 1.0:
            continue
        kraus = _single_mode_kraus(cutoff, t)
        c = np.array([h[j] + 1j * h[m + j] for j in range(m)])
        axis = np.nonzero(np.abs(np.abs(c) - 1.0) < 1e-14)[0]
        if axis.size == 1 and np.abs(c).sum() < 1.0 + 1e-12:
            data = _apply_axis_kraus(data, m, cutoff, int(axis[0]), kraus)
        else:
            U = _mode_rotation(m, cutoff, c.tobytes())
            data = U.conj().T @ data @ U
            data = _apply_axis_kraus(data, m, cutoff, 0, kraus)
            data = U @ data @ U.conj().T
    return FockDensityMatrix(m=m, cutoff=cutoff, data=data)


def _displacement(m, cutoff, beta):
    """D(beta) shifting x_j by beta_j and p_j by beta_{m+j}."""
    a = _ladder(cutoff).astype(complex)
    out = None
    for j in range(m):
        alpha = (beta[j] + 1j * beta[m + j]) / 2.0
        Dj = scipy.linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)
        out = Dj if out is None else np.kron(out, Dj)
    return out


def _wigner_kernel_plane(cutoff, x, p):
    """Exact Fock matrix elements of the displaced-parity kernel in one plane.

    Closed Laguerre form of (2 pi)^-1 D(beta) Pi D(beta)^dag, so evaluating
    the Wigner function of a truncated state carries no operator-truncation
    error of its own.
    """
    d = cutoff + 1
    alpha = (x - 1j * p) / 2.0
    r2 = x * x + p * p
    w = np.zeros((d, d), dtype=complex)
    for delta in range(d):
        n = np.arange(0, d - delta)
        lag = scipy.special.eval_genlaguerre(n, delta, r2)
        logc = 0.5 * (scipy.special.gammaln(n + 1) - scipy.special.gammaln(n + delta + 1))
        vals = (-1.0) ** n * np.exp(logc - r2 / 2.0) * (2.0 * alpha) ** delta * lag
        w[n + delta, n] = vals
        if delta:
            w[n, n + delta] = np.conj(vals)
    return w / (2.0 * np.pi)


def wigner_point(rho, beta):
    """Wigner value at one phase-space point, via the displaced-parity kernel.

    Normalized so the m-mode vacuum gives (2 pi)^-m e^{-|beta|^2/2}.
    Raises CutoffLeakage when the state is flagged unreliable.
    """
    rho.require_reliable()
    beta = as_phase_vector(beta, rho.m)
    d = rho.cutoff + 1
    kernels = [
        _wigner_kernel_plane(rho.cutoff, beta[j], beta[rho.m + j]) for j in range(rho.m)
    ]
    if rho.m == 1:
        val = np.einsum("mn,mn->", rho.data, kernels[0])
    elif rho.m == 2:
        rho4 = rho.data.reshape(d, d, d, d)
        val = np.einsum("abcd,ac,bd->", rho4, kernels[0], kernels[1])
    else:
        rho6 = rho.data.reshape((d,) * 6)
        val = np.einsum("abcdef,ad,be,cf->", rho6, kernels[0], kernels[1], kernels[2])
    return float(np.real(val))


def wigner_point_displaced_parity(rho, beta):
    """Literal displaced-parity trace (2 pi)^-m tr[rho D Pi D^dag].

    Numerically inferior to :func:`wigner_point` near the truncation edge
    (the displacement operator itself is truncated); kept as an independent
    cross-check of the kernel evaluation.
    """
    rho.require_reliable()
    beta = as_phase_vector(beta, rho.m)
    D = _displacement(rho.m, rho.cutoff, beta)
    rhoD = rho.data @ D
    diag = np.sum(D.conj() * rhoD, axis=0)
    val = float(np.real(diag @ _parity_vector(rho.m, rho.cutoff)))
    return val / (2.0 * np.pi) ** rho.m


def expectation(rho, op):
    return complex(np.trace(rho.data @ op))


def mean_quadratures(rho):
    qs = _quadrature_ops(rho.m, rho.cutoff)
    return np.array([expectation(rho, q).real for q in qs])


def measured_covariance(rho):
    """Symmetrized quadrature covariance of the state, means subtracted."""
    qs = _quadrature_ops(rho.m, rho.cutoff)
    mu = mean_quadratures(rho)
    n = len(qs)
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            sym = expectation(rho, (qs[i] @ qs[j] + qs[j] @ qs[i]) / 2.0).real
            V[i, j] = V[j, i] = sym - mu[i] * mu[j]
    return V


def partial_trace(rho, keep):
    """Reduced state over the kept modes (0-based indices)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= rho.m:
        raise ValueError("keep must be a non-empty subset of mode indices")
    drop = [j for j in range(rho.m) if j not in keep]
    if not drop:
        return rho
    d = rho.cutoff + 1
    rho_t = rho.data.reshape((d,) * (2 * rho.m))
    for j in sorted(drop, reverse=True):
        rho_t = np.trace(rho_t, axis1=j, axis2=rho_t.ndim // 2 + j)
    return FockDensityMatrix(m=len(keep), cutoff=rho.cutoff, data=rho_t.reshape((d ** len(keep),) * 2))


def trace_distance(rho1, rho2):
    ev = np.linalg.eigvalsh(rho1.data - rho2.data)
    return 0.5 * float(np.abs(ev).sum())


def _heisenberg_channel(op, m, cutoff, channel, xi):
    """Adjoint (Heisenberg) action of the loss channel on an observable."""
    out = op.copy()
    for h, gamma in zip(channel.modes, channel.gammas):
        t = float(np.exp(-xi * gamma / 2.0))
        if t >= 1.0:
            continue
        kraus = _single_mode_kraus(cutoff, t)
        c = np.array([h[j] + 1j * h[m + j] for j in range(m)])
        axis = np.nonzero(np.abs(np.abs(c) - 1.0) < 1e-14)[0]
        if axis.size == 1 and np.abs(c).sum() < 1.0 + 1e-12:
            full = [_embed_single_mode(m, cutoff, int(axis[0]), K) for K in kraus]
        else:
            U = _mode_rotation(m, cutoff, c.tobytes())
            full = [U @ _embed_single_mode(m, cutoff, 0, K) @ U.conj().T for K in kraus]
        out = sum(K.conj().T @ out @ K for K in full)
    return out


def _normal_monomial(m, cutoff, creators, annihilators):
    """a^dag(f_1) .. a^dag(f_r) a(f_{r+1}) .. a(f_s) from phase-space vectors."""
    d = (cutoff + 1) ** m
    op = np.eye(d, dtype=complex)
    for f in creators:
        op = op @ annihilation_operator(m, cutoff, f).conj().T
    for f in annihilators:
        op = op @ annihilation_operator(m, cutoff, f)
    return op


def exchange_identity_deviation(m, cutoff, creators, annihilators, gs, channel, xi, probes=None):
    """Worst-case probe deviation of the subtraction / loss exchange identity.

    Left side: a^dag(g_n)..a^dag(g_1) L_xi(x) a(g_1)..a(g_n) with x the
    normally ordered monomial over ``creators`` / ``annihilators`` and L_xi
    the Heisenberg-picture channel.  Right side: L_xi applied to the same
    sandwich with every g_j replaced by e^{xi D} g_j inside x's dressing.
    Both sides are traced against probe states; the maximum absolute
    difference is returned.
    """
    gen = _as_generator(channel)
    x = _normal_monomial(m, cutoff, creators, annihilators)
    a_ops = [annihilation_operator(m, cutoff, g) for g in gs]
    right_prod = np.eye(x.shape[0], dtype=complex)
    for op in a_ops:
        right_prod = right_prod @ op
    lhs = right_prod.conj().T @ _heisenberg_channel(x, m, cutoff, channel, xi) @ right_prod

    Ep = gen.decay(xi, +1)
    a_ops_drift = [annihilation_operator(m, cutoff, Ep @ np.asarray(g, float)) for g in gs]
    right_drift = np.eye(x.shape[0], dtype=complex)
    for op in a_ops_drift:
        right_drift = right_drift @ op
    inner = right_drift.conj().T @ x @ right_drift
    rhs = _heisenberg_channel(inner, m, cutoff, channel, xi)

    if probes is None:
        probes = default_probes(m, cutoff)
    diff = lhs - rhs
    return max(abs(complex(np.trace(p.data @ diff))) for p in probes)


def default_probes(m, cutoff):
    """Deterministic low-energy probe states for identity checks.

    Probe energy scales with the cutoff so every probe stays reliable; the
    entangled probe needs headroom and only joins at cutoff >= 18.
    """
    s = 10 ** ((2.0 if cutoff >= 12 else 1.0) / 10.0)
    probes = [vacuum(m, cutoff)]
    probes.append(build_state(m, cutoff, [("squeeze", j, s) for j in range(m)]))
    mix = [("thermal", 0, 1.1), ("squeeze", 0, 1.3)]
    mix += [("squeeze", j, s) for j in range(1, m)]
    probes.append(build_state(m, cutoff, mix))
    if m >= 2 and cutoff >= 18:
        probes.append(
            build_state(
                m,
                cutoff,
                [("squeeze", 0, 10 ** 0.1), ("squeeze", 1, 10 ** 0.1), ("cz", 0, 1)],
            )
        )
    return probes
