"""Radial heat kernels on rank-one symmetric spaces.

A K-equivariant heat kernel is determined by its restriction to a flat, a
function r -> K(r) with values in symmetric endomorphisms of the fiber at the
base point. Distances are measured in the metric where the shortest root has
unit length, so for real hyperbolic space the curvature is -1.

The unknown is stored in an orthonormal basis of the subspace of symmetric
endomorphisms that commute with the isotropy action and with the parallel
zero-order terms; the evolution preserves this subspace. The right-hand side
is linear and time independent, so it is assembled once as a sparse matrix
and advanced with classical RK4.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy import sparse
from scipy.integrate import quad

from .einstein_spectra import bundle_rep, normalization_scale, s_par, weyl_element
from .linalg import gram_schmidt, null_space

RK4_REAL_STABILITY = 2.785
SERIES_CUTOFF = 1e-3


@dataclass
class RadialModel:
    label: str
    rho: np.ndarray  # (N, f, f) action of k_i, normalized units
    alphas: np.ndarray  # (N,) alpha_i on the unit radial vector
    weyl: np.ndarray  # (f, f)
    k0: np.ndarray  # (d0, f, f)
    extra: np.ndarray | None = None  # parallel zero-order endomorphism (2R in the Einstein variant)
    lambda_c: float = 0.0  # bottom of the parabolic operator, including extra
    mu: np.ndarray = None  # largest eigenvalue of -rho_i^2

    @property
    def fiber_dim(self):
        return self.rho.shape[1]

    @property
    def dim(self):
        return len(self.alphas) + 1

    def s_par(self):
        return -np.einsum("iab,ibc->ac", self.rho, self.rho)


def heat_model(rs, kind, variant="plain"):
    """Radial model for a rank-one space and a bundle, in unit-short-root units."""
    if rs.rank != 1:
        raise ValueError("the radial heat model is implemented for rank one")
    rep = bundle_rep(rs, kind)
    s = normalization_scale(rs)
    rho = rep.rho_k * np.sqrt(s)
    alphas = np.abs(rs.roots[:, 0]) * np.sqrt(s)
    W = weyl_element(rep, rs)
    k0 = rep.rho_k0 * np.sqrt(s)
    extra = None
    if variant == "einstein":
        if rep.curvature is None:
            raise ValueError("the Einstein variant needs a symmetric-tensor bundle")
        extra = 2.0 * s * rep.curvature
    S = s * s_par(rep, variant)
    lam_c = float(np.linalg.eigvalsh(S)[0])
    mu = np.array([np.linalg.eigvalsh(-r @ r)[-1] for r in rho])
    return RadialModel(f"{rs.alg.label}:{kind}:{variant}", rho, alphas, W, k0, extra, lam_c, mu)


def scalar_model(alphas, label="trivial"):
    a = np.asarray(alphas, dtype=float)
    N = len(a)
    z = np.zeros((N, 1, 1))
    return RadialModel(label, z, a, np.eye(1), np.zeros((0, 1, 1)), None, 0.0, np.zeros(N))


def sphere_area(n):
    """Area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def volume_constant(alphas):
    """V0 such that V0 * prod sinh(alpha_i r) dr is the volume of geodesic shells."""
    a = np.asarray(alphas, dtype=float)
    return sphere_area(len(a) + 1) / float(np.prod(a))


def radial_weight(alphas, r):
    r = np.asarray(r, dtype=float)
    return np.prod(np.sinh(np.outer(r, alphas)), axis=1)


def coth_series(x):
    """coth x, with the Laurent series near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0 - x ** 3 / 45.0, 1.0 / np.tanh(xs))
    return out


def inv_sinh2(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    xx = np.where(small, x, 1.0)
    return np.where(small, 1.0 / xx ** 2 - 1.0 / 3.0 + xx ** 2 / 15.0, 1.0 / np.sinh(xs) ** 2)


def cosh_over_sinh2(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    xx = np.where(small, x, 1.0)
    return np.where(small, 1.0 / xx ** 2 + 1.0 / 6.0 + 7.0 * xx ** 2 / 360.0, np.cosh(xs) / np.sinh(xs) ** 2)


def cosh_minus_one_over_sinh2(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    xx = np.where(small, x, 0.0)
    return np.where(small, 0.5 - xx ** 2 / 24.0, (np.cosh(xs) - 1.0) / np.sinh(xs) ** 2)


def invariant_basis(model):
    """Orthonormal basis (m, f, f) of symmetric X commuting with k0, S_par and the extra term."""
    f = model.fiber_dim
    iu = [(i, j) for i in range(f) for j in range(i, f)]
    S = np.zeros((len(iu), f, f))
    for p, (i, j) in enumerate(iu):
        if i == j:
            S[p, i, i] = 1.0
        else:
            S[p, i, j] = S[p, j, i] = 1.0 / np.sqrt(2.0)
    gens = list(model.k0) + [model.s_par()]
    if model.extra is not None:
        gens.append(model.extra)
    rows = []
    for G in gens:
        rows.append(np.array([(G @ X - X @ G).ravel() for X in S]).T)
    if rows:
        K = null_space(np.vstack(rows))
    else:
        K = np.eye(len(iu))
    Phi = np.einsum("pm,pij->mij", K, S)
    # canonical orientation: Gram-Schmidt of projected unit symmetric matrices
    flat = Phi.reshape(len(Phi), -1)
    P = flat.T @ flat
    B = gram_schmidt(np.array([P @ X.ravel() for X in S]), drop_tol=1e-8)[: len(Phi)]
    return B.reshape(-1, f, f)


def _project(Phi, op):
    """Matrix <Phi_a, op(Phi_b)> of a linear map on matrices."""
    m = len(Phi)
    M = np.zeros((m, m))
    for b in range(m):
        Y = op(Phi[b])
        M[:, b] = np.einsum("aij,ij->a", Phi, Y)
    return M


@dataclass
class ZeroOrderTerms:
    """Radial zero-order term sum_g [a_g(r) P_g - 2 c_g(r) Q_g] + Z_const."""

    alphas: np.ndarray  # distinct alpha values
    P: np.ndarray  # (G, m, m): X rho^2 + rho^2 X summed over roots with that alpha
    Q: np.ndarray  # (G, m, m): rho X rho
    const: np.ndarray  # (m, m)
    potential: callable = None  # optional extra scalar r-dependent term (m must be 1)

    def at(self, r):
        r = np.asarray(r, dtype=float)
        Z = np.broadcast_to(self.const, (len(r),) + self.const.shape).copy()
        for a, P, Q in zip(self.alphas, self.P, self.Q):
            Z += inv_sinh2(a * r)[:, None, None] * P[None]
            Z -= 2.0 * cosh_over_sinh2(a * r)[:, None, None] * Q[None]
        if self.potential is not None:
            Z += self.potential(r)[:, None, None]
        return Z


def zero_order_terms(model, Phi):
    groups = {}
    for i, a in enumerate(model.alphas):
        key = round(float(a), 9)
        groups.setdefault(key, []).append(i)
    alphas, Ps, Qs = [], [], []
    for a, idx in sorted(groups.items()):
        P = sum(_project(Phi, lambda X, R=model.rho[i]: X @ R @ R + R @ R @ X) for i in idx)
        Q = sum(_project(Phi, lambda X, R=model.rho[i]: R @ X @ R) for i in idx)
        alphas.append(a)
        Ps.append(P)
        Qs.append(Q)
    S = model.s_par()
    const = _project(Phi, lambda X: -0.5 * (S @ X + X @ S))
    if model.extra is not None:
        E = model.extra
        const = const + _project(Phi, lambda X: 0.5 * (E @ X + X @ E))
    return ZeroOrderTerms(np.array(alphas), np.array(Ps), np.array(Qs), const)


def log_radial_weight(alphas, r):
    """log prod sinh(alpha_i r), overflow free; -inf at r = 0."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    with np.errstate(divide="ignore"):
        for a in alphas:
            x = a * r
            out += x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)
    return out


def cell_weights(alphas, dr, J, order=8):
    """Face weights w(j dr), j = 0..J, and cell averages (1/dr) int_cell w, by Gauss-Legendre."""
    faces = np.arange(J + 1) * dr
    wf = np.exp(log_radial_weight(alphas, faces))
    x, g = np.polynomial.legendre.leggauss(order)
    s = faces[:-1, None] + 0.5 * dr * (x[None, :] + 1.0)
    ref = log_radial_weight(alphas, faces[1:])
    avg = 0.5 * np.sum(g[None, :] * np.exp(log_radial_weight(alphas, s) - ref[:, None]), axis=1)
    return wf, avg * np.exp(ref)


def _assemble(diag_blocks, lower, upper):
    J, m, _ = diag_blocks.shape
    rows, cols, vals = [], [], []
    bi, bj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    for j in range(J):
        rows.append(j * m + bi.ravel())
        cols.append(j * m + bj.ravel())
        vals.append(diag_blocks[j].ravel())
    d = np.arange(m)
    for j in range(1, J):
        rows.append(j * m + d)
        cols.append((j - 1) * m + d)
        vals.append(np.full(m, lower[j]))
    for j in range(J - 1):
        rows.append(j * m + d)
        cols.append((j + 1) * m + d)
        vals.append(np.full(m, upper[j]))
    A = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(J * m, J * m)
    )
    A.eliminate_zeros()
    return A


def radial_operator(r, dr, alphas, Z, Wm, scheme="conservative"):
    """Sparse RHS for the coefficient vector (node-major), grid r_j = (j + 1/2) dr.

    ``conservative``: flux form (1/w) d/dr (w dK/dr) with face weights and
    exact cell averages of w = prod sinh(alpha_i r). The face weight vanishes at
    r = 0, so no ghost value is needed there, and the weighted sum of a scalar
    kernel is conserved exactly up to outflow.

    ``central``: central differences for d^2/dr^2 + sum alpha_i coth(alpha_i r) d/dr,
    with the ghost value at -r_0 equal to the Weyl conjugate of the value at r_0.

    Both set the kernel to zero one cell beyond the last node.
    """
    J = len(r)
    m = Z.shape[1]
    if scheme == "conservative":
        wf, V = cell_weights(alphas, dr, J)
        lower = wf[:-1] / (V * dr * dr)
        upper = wf[1:] / (V * dr * dr)
        diag_blocks = Z - (lower + upper)[:, None, None] * np.eye(m)[None]
    elif scheme == "central":
        beta = np.zeros(J)
        for a in alphas:
            beta += a * coth_series(a * r)
        lower = 1.0 / dr ** 2 - beta / (2 * dr)
        upper = 1.0 / dr ** 2 + beta / (2 * dr)
        diag_blocks = Z - (2.0 / dr ** 2) * np.eye(m)[None]
        diag_blocks[0] += lower[0] * Wm
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return _assemble(diag_blocks, lower, upper)


def spectral_radius(A, iters=200, seed=0):
    """Power-iteration estimate of the largest eigenvalue modulus."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=A.shape[0])
    lam = 0.0
    for _ in range(iters):
        y = A @ x
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0
        lam = nrm / np.linalg.norm(x)
        x = y / nrm
    return lam


@dataclass
class HeatState:
    model: RadialModel
    r: np.ndarray
    dr: float
    Phi: np.ndarray
    c: np.ndarray  # (J, m)
    t: float
    t0: float
    A: object
    dt_max: float
    zero_order: ZeroOrderTerms = None
    weights: np.ndarray = None  # quadrature weight of each node (without V0 and dr)
    scheme: str = "conservative"

    @property
    def K(self):
        return np.einsum("ja,aik->jik", self.c, self.Phi)

    @property
    def J(self):
        return len(self.r)

    def eig_extremes(self):
        K = self.K
        if K.shape[1] == 1:
            v = K[:, 0, 0]
            return v, v
        w = np.linalg.eigvalsh(0.5 * (K + np.transpose(K, (0, 2, 1))))
        return w[:, -1], w[:, 0]


def _build_state(model, dr, R_max, t0, Phi, Z, Wm, scheme):
    J = int(round(R_max / dr))
    r = (np.arange(J) + 0.5) * dr
    A = radial_operator(r, dr, model.alphas, Z.at(r), Wm, scheme)
    if scheme == "conservative":
        weights = cell_weights(model.alphas, dr, J)[1]
    else:
        weights = radial_weight(model.alphas, r)
    rho = spectral_radius(A)
    dt_max = min(0.2 * dr * dr, 0.9 * RK4_REAL_STABILITY / rho)
    n = model.dim
    G = (4 * np.pi * t0) ** (-n / 2) * np.exp(-r ** 2 / (4 * t0))
    # identity in the invariant basis
    f = model.fiber_dim
    idc = np.einsum("aij,ij->a", Phi, np.eye(f))
    c = np.outer(G, idc)
    return HeatState(model, r, dr, Phi, c, t0, t0, A, dt_max, Z, weights, scheme)


def default_rmax(alphas, T):
    """Outer radius for a run to time T: the weighted mass of the kernel travels
    outwards at speed sum(alpha) and spreads like sqrt(2t)."""
    v = float(np.sum(alphas))
    return float(max(30.0, math.ceil(v * T + 6.0 * math.sqrt(2.0 * T))))


def init(model, dr=0.02, R_max=30.0, t0=0.01, scheme="conservative"):
    """Initial kernel K = (4 pi t0)^(-n/2) exp(-r^2 / 4 t0) Id on the staggered grid."""
    if dr <= 0 or R_max <= 10 * dr:
        raise ValueError("grid too small")
    if t0 < 4 * dr * dr:
        raise ValueError("initial Gaussian is under-resolved: need t0 >= 4 dr^2")
    Phi = invariant_basis(model)
    Z = zero_order_terms(model, Phi)
    Wm = _project(Phi, lambda X: model.weyl @ X @ model.weyl.T)
    return _build_state(model, dr, R_max, t0, Phi, Z, Wm, scheme)


def comparison_kernel(model, dr=0.02, R_max=30.0, t0=0.01, scheme="conservative"):
    """Scalar kernel with potential -lambda_c + sum 2 mu_i (cosh(alpha_i r) - 1)/sinh^2(alpha_i r)."""
    sm = scalar_model(model.alphas, label=model.label + ":comparison")
    Phi = np.ones((1, 1, 1))
    alphas, mu, lam = model.alphas, model.mu, model.lambda_c

    def potential(r):
        out = np.full(len(r), -lam)
        for a, m in zip(alphas, mu):
            out += 2.0 * m * cosh_minus_one_over_sinh2(a * r)
        return out

    Z = ZeroOrderTerms(np.zeros(0), np.zeros((0, 1, 1)), np.zeros((0, 1, 1)), np.zeros((1, 1)), potential)
    return _build_state(sm, dr, R_max, t0, Phi, Z, np.eye(1), scheme)


def step(state, dt):
    """One classical RK4 step."""
    if dt > state.dt_max * (1 + 1e-12):
        raise ValueError(f"dt={dt:.3e} exceeds the stability bound {state.dt_max:.3e}")
    A = state.A
    c = state.c.ravel()
    k1 = A @ c
    k2 = A @ (c + 0.5 * dt * k1)
    k3 = A @ (c + 0.5 * dt * k2)
    k4 = A @ (c + dt * k3)
    state.c = (c + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)).reshape(state.c.shape)
    state.t += dt
    return state


def weighted_norm(state, p=1, kmax=None):
    """H^(p)(t) = (V0 int prod sinh(alpha_i r) K_max(r)^p dr)^(1/p).

    Each node carries its cell average of the weight (conservative scheme) or
    the weight at the node (central scheme).
    """
    if kmax is None:
        kmax = state.eig_extremes()[0]
    w = volume_constant(state.model.alphas) * state.weights
    return float(np.sum(w * np.abs(kmax) ** p) * state.dr) ** (1.0 / p)


@dataclass
class HeatRun:
    label: str
    dr: float
    R_max: float
    t0: float
    dt: float
    times: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    kmax: np.ndarray  # (samples, J)
    kmin: np.ndarray
    r: np.ndarray
    alphas: np.ndarray
    comparison: np.ndarray | None = None  # (samples, J)
    checks: dict = field(default_factory=dict)
    weights: np.ndarray = None
    scheme: str = "conservative"

    def manifest(self):
        return {
            "label": self.label,
            "dr": self.dr,
            "R_max": self.R_max,
            "t0": self.t0,
            "dt": self.dt,
            "scheme": self.scheme,
            "samples": int(len(self.times)),
            "alphas": [float(a) for a in self.alphas],
            "checks": self.checks,
        }

    def series_csv(self):
        lines = ["t,H1,H2,sup_K"]
        for t, h1, h2, km in zip(self.times, self.H1, self.H2, self.kmax):
            lines.append(f"{t!r},{h1!r},{h2!r},{float(np.max(km))!r}")
        return "\n".join(lines) + "\n"


def evolve(state, T, sample_every=0.1, dt=None, companion=None):
    """Advance to time T, sampling K_max, K_min and H^(1), H^(2) every sample_every.

    ``companion`` is an optional second state (the comparison kernel) advanced
    with the same time step.
    """
    dt_cap = state.dt_max if companion is None else min(state.dt_max, companion.dt_max)
    if dt is None:
        dt = dt_cap
    if dt > dt_cap * (1 + 1e-12):
        raise ValueError(f"dt={dt:.3e} exceeds the stability bound {dt_cap:.3e}")
    sub = max(1, int(math.ceil(sample_every / dt)))
    dt = sample_every / sub
    n_samples = int(math.ceil((T - state.t) / sample_every - 1e-9))
    times, H1, H2, kmax, kmin, comp = [], [], [], [], [], []

    def record():
        hi, lo = state.eig_extremes()
        times.append(state.t)
        H1.append(weighted_norm(state, 1, hi))
        H2.append(weighted_norm(state, 2, hi))
        kmax.append(hi)
        kmin.append(lo)
        if companion is not None:
            comp.append(companion.c[:, 0].copy())

    record()
    for _ in range(n_samples):
        for _ in range(sub):
            step(state, dt)
            if companion is not None:
                step(companion, dt)
        record()
    run = HeatRun(
        state.model.label, state.dr, float(state.r[-1] + state.dr / 2), state.t0, dt,
        np.array(times), np.array(H1), np.array(H2), np.array(kmax), np.array(kmin),
        state.r.copy(), state.model.alphas.copy(), np.array(comp) if comp else None,
        weights=state.weights.copy(), scheme=state.scheme,
    )
    return run


def run_heat(model, dr, R_max, t0, T, sample_every=0.1, comparison=True, scheme="conservative"):
    """Evolve the kernel (and optionally its scalar comparison kernel) and collect checks.

    ``R_max=None`` picks default_rmax(alphas, T).
    """
    if R_max is None:
        R_max = default_rmax(model.alphas, T)
    state = init(model, dr, R_max, t0, scheme)
    comp = comparison_kernel(model, dr, R_max, t0, scheme) if comparison else None
    run = evolve(state, T, sample_every, companion=comp)
    run.checks.update(positivity_check(run))
    if comparison:
        run.checks.update(domination_check(run))
    return run


def positivity_check(run):
    scale = np.max(np.abs(run.kmax), axis=1)
    ratio = np.min(run.kmin / scale[:, None])
    return {"min_eig_over_norm": float(ratio)}


def domination_check(run, floor=1e-12):
    """Largest K_max / K_comp over nodes where K_comp is above floor times its peak."""
    comp = run.comparison
    peak = np.max(np.abs(comp), axis=1)
    mask = comp > floor * peak[:, None]
    ratio = np.where(mask, run.kmax / np.where(mask, comp, 1.0), 0.0)
    return {"domination_ratio": float(np.max(ratio))}


@dataclass
class DecayFit:
    rate: float
    log_prefactor: float
    window: tuple
    max_residual: float
    efoldings: float
    window_too_short: bool

    def to_dict(self):
        return {
            "rate": self.rate,
            "log_prefactor": self.log_prefactor,
            "window": list(self.window),
            "max_residual": self.max_residual,
            "efoldings": self.efoldings,
            "window_too_short": self.window_too_short,
        }


def fit_decay(times, values, window=None):
    """Least-squares fit log H = log C - rate t on the window (default [T/2, T])."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("decay fit needs positive values")
    if window is None:
        window = (times[-1] / 2.0, times[-1])
    sel = (times >= window[0] - 1e-12) & (times <= window[1] + 1e-12)
    if sel.sum() < 3:
        raise ValueError("fit window has fewer than 3 samples")
    t = times[sel]
    y = np.log(values[sel])
    slope, icpt = np.polyfit(t, y, 1)
    resid = float(np.max(np.abs(y - (slope * t + icpt))))
    rate = -float(slope)
    ef = abs(rate) * (window[1] - window[0])
    return DecayFit(rate, float(icpt), (float(window[0]), float(window[1])), resid, ef, bool(ef < 5.0))


def fit_power_correction(times, values, window=None):
    """Fit log H = c - rate t + k log t on the window; returns (rate, k).

    Exploratory: separates a polynomial prefactor t^k from the exponential rate.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is None:
        window = (times[-1] / 2.0, times[-1])
    sel = (times >= window[0] - 1e-12) & (times <= window[1] + 1e-12) & (times > 0)
    if sel.sum() < 4:
        raise ValueError("fit window has fewer than 4 samples")
    t = times[sel]
    A = np.column_stack([np.ones_like(t), -t, np.log(t)])
    coef, *_ = np.linalg.lstsq(A, np.log(values[sel]), rcond=None)
    return float(coef[1]), float(coef[2])


def ball_volumes(alphas, r):
    """vol B_r = V0 int_0^r prod sinh(alpha_i s) ds at each r (cumulative quadrature)."""
    r = np.asarray(r, dtype=float)
    V0 = volume_constant(alphas)
    f = lambda s: float(np.prod(np.sinh(np.asarray(alphas) * s)))
    edges = np.concatenate([[0.0], r])
    pieces = [quad(f, a, b, epsrel=1e-12)[0] for a, b in zip(edges[:-1], edges[1:])]
    return V0 * np.cumsum(pieces)


def pointwise_envelope(run, lambda0):
    """sup_r |K_t(r)| vol(B_r) e^(lambda0 t) per sample, and its growth over the final half."""
    vol = ball_volumes(run.alphas, run.r)
    env = np.max(np.abs(run.kmax) * vol[None, :], axis=1) * np.exp(lambda0 * run.times)
    T = run.times[-1]
    half = run.times >= T / 2 - 1e-12
    late = env[half]
    growth = float(np.max(late) / late[0] - 1.0)
    return env, growth


def green_l1(times, H1, lam, fit=None):
    """int e^(lam t) H^(1)_t dt over the run plus an exponential tail beyond T."""
    times = np.asarray(times, dtype=float)
    H1 = np.asarray(H1, dtype=float)
    body = float(np.trapezoid(np.exp(lam * times) * H1, times))
    fit = fit or fit_decay(times, H1)
    if fit.rate <= lam:
        return body, math.inf
    T = times[-1]
    tail = math.exp(lam * T) * H1[-1] / (fit.rate - lam)
    return body + tail, tail


def radial_integral_bound(run, a, w):
    """I(t) = int |K_t|(r) / (r + 1 + a)^w dvol and the products I(t) (1 + a + t)^w."""
    dens = volume_constant(run.alphas) * run.weights
    I = np.sum(np.abs(run.kmax) * dens[None, :] / (run.r[None, :] + 1.0 + a) ** w, axis=1) * run.dr
    return I, I * (1.0 + a + run.times) ** w


def to_json(run, extra=None):
    d = run.manifest()
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=True, default=float)
