"""Geometric checks: ball volumes, sector complements in hyperbolic space and
the covering regions of a Weyl chamber used by the cutoff construction.
"""

from dataclasses import dataclass, field
from itertools import product
import math

import mpmath
import numpy as np
from scipy.integrate import quad

from .einstein_spectra import normalization_scale
from .heat_sim import sphere_area, volume_constant
from .root_system import enumerate_walls

HIGH_PRECISION_DPS = 50


def ball_volume(alphas, r):
    """V0 * int_0^r prod sinh(alpha_i s) ds for a rank-one space."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0:
        return 0.0
    a = np.asarray(alphas, dtype=float)
    f = lambda s: float(np.prod(np.sinh(a * s)))
    val, _ = quad(f, 0.0, r, epsrel=1e-12, epsabs=0.0, limit=200)
    return volume_constant(a) * val


# ---------------------------------------------------------------- sectors

def _shifted_cosh(D, a, theta):
    """cosh of the third side: cosh(D) cosh(a) - sinh(D) sinh(a) cos(theta), written without cancellation."""
    return math.cosh(D - a) + 2.0 * math.sinh(D) * math.sinh(a) * math.sin(theta / 2) ** 2


def _far_distance(D, r0, theta):
    """Largest a' >= 0 such that the point at distance a' from x1, at angle theta
    from the direction of x0 (|x0 x1| = D), lies in the closed ball B_r0(x0).

    Returns (a_lo, a_hi) or None if the ray misses the ball.
    With u = e^a' the condition is P u^2 - 2 cosh(r0) u + Q <= 0.
    """
    P = math.exp(-D) + 2.0 * math.sinh(D) * math.sin(theta / 2) ** 2
    Q = math.exp(D) - 2.0 * math.sinh(D) * math.sin(theta / 2) ** 2
    sD = math.sinh(D) * math.sin(theta)
    disc = (math.sinh(r0) - sD) * (math.sinh(r0) + sD)
    if disc < 0:
        return None
    hi = (math.cosh(r0) + math.sqrt(disc)) / P
    if hi < 1.0:
        return None
    lo = Q / (P * hi)
    return max(0.0, math.log(lo)), math.log(hi)


def _far_distance_mp(D, r0, theta):
    with mpmath.workdps(HIGH_PRECISION_DPS):
        D, r0, theta = mpmath.mpf(D), mpmath.mpf(r0), mpmath.mpf(theta)
        P = mpmath.cosh(D) - mpmath.sinh(D) * mpmath.cos(theta)
        Q = mpmath.cosh(D) + mpmath.sinh(D) * mpmath.cos(theta)
        disc = mpmath.cosh(r0) ** 2 - P * Q
        if disc < 0:
            return None
        return mpmath.log((mpmath.cosh(r0) + mpmath.sqrt(disc)) / P)


def sector_radius(d, alpha):
    """a with sinh a = e^-d / (1 - cos alpha)."""
    return math.asinh(math.exp(-d) / (2.0 * math.sin(alpha / 2) ** 2))


def _shell(n, a_lo, a_hi):
    """int_{a_lo}^{a_hi} sinh^(n-1) s ds."""
    if n == 3:
        F = lambda s: math.sinh(2 * s) / 4.0 - s / 2.0
        return F(a_hi) - F(a_lo)
    if n == 2:
        return math.cosh(a_hi) - math.cosh(a_lo)
    return quad(lambda s: math.sinh(s) ** (n - 1), a_lo, a_hi, epsrel=1e-11)[0]


def complement_volume(n, r0, d, alpha):
    """vol(B_r0(x0) minus the closed sector of half-angle alpha at x1 towards x0)."""
    D = r0 + d
    if D <= 0:
        raise ValueError("x1 must differ from x0")
    area = sphere_area(n - 1) if n > 2 else 2.0

    def integrand(theta):
        ext = _far_distance(D, r0, theta)
        if ext is None:
            return 0.0
        return _shell(n, *ext) * math.sin(theta) ** (n - 2)

    # the rays hit the ball only while sin(theta) <= sinh r0 / sinh D
    pts = []
    if math.sinh(r0) < math.sinh(D):
        th = math.asin(math.sinh(r0) / math.sinh(D))
        if alpha < th:
            pts = [th]
    val = quad(integrand, alpha, math.pi, points=pts or None, limit=200, epsrel=1e-10)[0]
    if n == 2:
        return 2.0 * val
    return area * val


@dataclass
class SectorCase:
    n: int
    r0: float
    d: float
    alpha: float
    radius: float  # a
    max_distance: float  # largest d(x1, x') over the complement
    margin: float  # radius - max_distance (high precision)
    violations: int
    complement_volume: float
    bound: float  # e^-(n-1)d alpha^-2(n-1)

    @property
    def ratio(self):
        return self.complement_volume / self.bound

    def row(self):
        return [self.n, self.r0, self.d, self.alpha, self.complement_volume, self.bound, self.ratio]


def sector_case(n, r0, d, alpha, samples=200, rng=None, n_theta=257):
    """Containment B_r0(x0) minus sector within B_a(x1), and the complement volume."""
    if not 0 < alpha < math.pi / 2:
        raise ValueError("need 0 < alpha < pi/2")
    D = r0 + d
    a = sector_radius(d, alpha)
    # extremal distance over a theta grid clustered at alpha, where it is largest
    s = np.linspace(0.0, 1.0, n_theta) ** 2
    thetas = alpha + (math.pi - alpha) * s
    best, best_theta = -math.inf, alpha
    for th in thetas:
        ext = _far_distance(D, r0, th)
        if ext is not None and ext[1] > best:
            best, best_theta = ext[1], th
    violations = 0
    margin = math.inf
    if best > -math.inf:
        hp = _far_distance_mp(D, r0, best_theta)
        with mpmath.workdps(HIGH_PRECISION_DPS):
            a_hp = mpmath.asinh(mpmath.exp(-mpmath.mpf(d)) / (1 - mpmath.cos(mpmath.mpf(alpha))))
            margin = float(a_hp - hp)
        if margin < 0:
            violations += 1
    # random points of the complement, tested directly with the law of cosines
    rng = rng or np.random.default_rng(0)
    top = max(best, 0.0) * 1.5 + 1.0
    for th, ap in zip(rng.uniform(alpha, math.pi, samples), rng.uniform(0.0, top, samples)):
        if _shifted_cosh(D, ap, th) <= math.cosh(r0) and ap > a:
            with mpmath.workdps(HIGH_PRECISION_DPS):
                Dm, am, tm = mpmath.mpf(D), mpmath.mpf(ap), mpmath.mpf(th)
                c = mpmath.cosh(Dm) * mpmath.cosh(am) - mpmath.sinh(Dm) * mpmath.sinh(am) * mpmath.cos(tm)
                a_hp = mpmath.asinh(mpmath.exp(-mpmath.mpf(d)) / (1 - mpmath.cos(mpmath.mpf(alpha))))
                if c <= mpmath.cosh(mpmath.mpf(r0)) and am > a_hp:
                    violations += 1
    vol = complement_volume(n, r0, d, alpha)
    bound = math.exp(-(n - 1) * d) * alpha ** (-2 * (n - 1))
    return SectorCase(n, r0, d, alpha, a, best, margin, violations, vol, bound)


@dataclass
class SectorReport:
    cases: list
    fitted_C: float
    violations: int
    worst_margin: float
    ball_bound_ok: bool

    def to_dict(self):
        return {
            "cases": len(self.cases),
            "fitted_C": self.fitted_C,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "ball_bound_ok": self.ball_bound_ok,
        }

    def to_csv(self):
        lines = ["n,r0,d,alpha,complement_volume,bound,ratio"]
        for c in self.cases:
            lines.append(",".join(repr(float(x)) if not isinstance(x, int) else str(x) for x in c.row()))
        return "\n".join(lines) + "\n"


def sector_volume_check(n=3, r0s=range(1, 11), ds=range(0, 9), alphas=None, samples=200, seed=0):
    """Sweep the sector estimate: containment, and the ratio to e^-(n-1)d alpha^-2(n-1)."""
    if alphas is None:
        alphas = [round(0.1 * k, 10) for k in range(1, 11)]
    rng = np.random.default_rng(seed)
    cases = []
    ball_ok = True
    for r0, d, al in product(r0s, ds, alphas):
        c = sector_case(n, float(r0), float(d), float(al), samples, rng)
        cases.append(c)
        # the complement lies in B_a(x1), so its volume is at most that ball's
        vb = sphere_area(n) * _shell(n, 0.0, c.radius)
        if c.complement_volume > vb * (1 + 1e-8) + 1e-14:
            ball_ok = False
    C = max(c.ratio for c in cases)
    return SectorReport(
        cases, float(C), int(sum(c.violations for c in cases)),
        float(min(c.margin for c in cases)), ball_ok,
    )


# ---------------------------------------------------------------- regions

@dataclass
class RegionConstants:
    C0: float
    C1: float
    a: dict  # wall key -> a_W
    b: dict  # wall key -> b_W

    def check(self, rank, tol=1e-12):
        """Violations of a_W, b_W > 1, b_W - C0 a_W >= 1 and a_W' >= 2 a_W + 4 C1 b_W
        for W' in the boundary of W."""
        bad = []
        for key in self.a:
            if self.b[key] - self.C0 * self.a[key] < 1 - tol:
                bad.append(("b-C0a", key))
            if self.a[key] <= 1 or self.b[key] <= 1:
                bad.append(("gt1", key))
            for k2 in boundary_keys(key, rank):
                if self.a[k2] < 2 * self.a[key] + 4 * self.C1 * self.b[key] - tol:
                    bad.append(("a-chain", key, k2))
        return bad

    def to_dict(self):
        fmt = lambda k: "ov[" + ",".join(str(i) for i in k) + "]"
        return {
            "C0": self.C0,
            "C1": self.C1,
            "a": {fmt(k): v for k, v in sorted(self.a.items())},
            "b": {fmt(k): v for k, v in sorted(self.b.items())},
        }


def boundary_keys(key, rank):
    """Codimension-one walls of a wall: add one more simple root to the ov set."""
    return [tuple(sorted(key + (i,))) for i in range(rank) if i not in key]


class RegionGeometry:
    """Roots (unit-short-root scale) and the ov/un splitting of every wall."""

    def __init__(self, rs):
        self.rs = rs
        self.rank = rs.rank
        s = normalization_scale(rs)
        self.roots = rs.distinct_roots * math.sqrt(s)
        self.simple = self.roots[rs.simple]
        self.walls = enumerate_walls(rs)
        self.by_key = {w.key: w for w in self.walls}

    def projectors(self, key):
        w = self.by_key[key]
        Pov = w.ov_a.T @ w.ov_a
        return Pov, np.eye(self.rank) - Pov

    def un_simple(self, key):
        return [i for i in range(self.rank) if i not in key]

    def un_roots(self, key):
        return self.roots[self.by_key[key].un_roots]


def choose_region_constants(rs):
    """C0 = max over un roots of |alpha o proj_ov|, C1 = max over un simple beta of
    1 / |proj_un beta^#| (taken over all walls); then b_W = C0 a_W + 2 and a_W
    grows along chains of walls as 2 a_W + 4 C1 b_W + 1."""
    geo = RegionGeometry(rs)
    C0, C1 = 0.0, 0.0
    for w in geo.walls:
        Pov, Pun = geo.projectors(w.key)
        for al in geo.un_roots(w.key):
            C0 = max(C0, float(np.linalg.norm(Pov @ al)))
        for i in geo.un_simple(w.key):
            C1 = max(C1, 1.0 / float(np.linalg.norm(Pun @ geo.simple[i])))
    a, b = {}, {}
    # the chamber has no ov part; walls are processed by increasing ov size
    for w in sorted(geo.walls, key=lambda w: len(w.key)):
        if not w.key:
            a[w.key] = 2.0
        else:
            preds = [w.key[:j] + w.key[j + 1:] for j in range(len(w.key))]
            a[w.key] = max(2 * a[p] + 4 * C1 * b[p] for p in preds) + 1.0
        b[w.key] = C0 * a[w.key] + 2.0
    consts = RegionConstants(C0, C1, a, b)
    bad = consts.check(geo.rank)
    if bad:
        raise RuntimeError(f"region constants violate their constraints: {bad}")
    return consts


@dataclass
class Regions:
    """Membership tests for X, S and R of one wall at scale sigma."""

    geo: RegionGeometry
    consts: RegionConstants

    def parts(self, key, v):
        Pov, Pun = self.geo.projectors(key)
        ov = v @ Pov
        un = v @ Pun
        un_vals = un @ self.geo.simple[self.geo.un_simple(key)].T
        return np.linalg.norm(ov, axis=-1), un_vals

    def margin_X(self, key, v, sigma):
        nov, uv = self.parts(key, v)
        m = self.consts.a[key] * (sigma - 1) - nov
        if uv.shape[-1]:
            m = np.minimum(m, uv.min(axis=-1))
        return m

    def margin_S(self, key, v, sigma):
        nov, uv = self.parts(key, v)
        m = self.consts.a[key] * sigma - nov
        if uv.shape[-1]:
            m = np.minimum(m, uv.min(axis=-1) - self.consts.b[key] * sigma)
        return m

    def margin_R(self, key, v, sigma):
        nov, uv = self.parts(key, v)
        m = self.consts.a[key] * (sigma - 1) - nov
        if uv.shape[-1]:
            m = np.minimum(m, uv.min(axis=-1) - self.consts.b[key] * (sigma + 1))
        return m

    def margin_X_union(self, keys, v, sigma):
        if not keys:
            return np.full(len(v), -np.inf)
        return np.max([self.margin_X(k, v, sigma) for k in keys], axis=0)


def _sample(geo, key, n, ov_radius, lo, hi, rng):
    """Points with |ov v| <= ov_radius (uniform in the ball) and beta(un v) uniform in [lo, hi]
    for each un simple root beta."""
    w = geo.by_key[key]
    d_ov = len(w.ov_a)
    v = np.zeros((n, geo.rank))
    if d_ov:
        g = rng.normal(size=(n, d_ov))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = ov_radius * rng.uniform(size=(n, 1)) ** (1.0 / d_ov)
        v += (g * rad) @ w.ov_a
    un_idx = geo.un_simple(key)
    if un_idx:
        vals = rng.uniform(lo, hi, size=(n, len(un_idx)))
        # solve beta_i(un v) = vals_i for un v in un a
        B = geo.simple[un_idx] @ w.un_a.T
        coords = np.linalg.solve(B, vals.T).T
        v += coords @ w.un_a
    return v


@dataclass
class RegionReport:
    space: str
    sigma: float
    samples: int
    constants: dict
    violations: dict = field(default_factory=dict)
    worst_margin: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v == 0 for v in self.violations.values())

    def to_dict(self):
        return {
            "space": self.space,
            "sigma": self.sigma,
            "samples": self.samples,
            "constants": self.constants,
            "violations": dict(sorted(self.violations.items())),
            "worst_margin": dict(sorted(self.worst_margin.items())),
            "passed": self.passed,
        }


def _margin_mp(reg, kind, key, p, sigma):
    """Membership margin of one point in X, S or R, in high precision."""
    geo = reg.geo
    w = geo.by_key[key]
    with mpmath.workdps(HIGH_PRECISION_DPS):
        v = mpmath.matrix([mpmath.mpf(float(x)) for x in p])
        B = mpmath.matrix(w.ov_a.tolist()) if len(w.ov_a) else None
        ov = (B.T * (B * v)) if B is not None else v * 0
        un = v - ov
        nov = mpmath.norm(ov)
        sig = mpmath.mpf(sigma)
        a, b = mpmath.mpf(reg.consts.a[key]), mpmath.mpf(reg.consts.b[key])
        uv = [mpmath.fdot(list(un), [mpmath.mpf(float(x)) for x in geo.simple[i]]) for i in geo.un_simple(key)]
        if kind == "X":
            terms = [a * (sig - 1) - nov] + uv
        elif kind == "S":
            terms = [a * sig - nov] + [u - b * sig for u in uv]
        else:
            terms = [a * (sig - 1) - nov] + [u - b * (sig + 1) for u in uv]
        return min(terms)


def _confirm_union(reg, key, bkeys, p, sigma, with_R):
    """True if a candidate point is outside every covering region, in high precision."""
    ms = [_margin_mp(reg, "X", k, p, sigma) for k in bkeys]
    if with_R:
        ms.append(_margin_mp(reg, "R", key, p, sigma))
    return bool(ms) and max(ms) < 0 or not ms


def verify_regions(rs, consts=None, sigma=12.0, samples=100_000, seed=0, fs=(1.0, 2.0, 5.0)):
    """Sample every wall's regions and test the three properties.

    (1) un alpha(v) >= sigma on S for every un root alpha;
    (2) points of S with beta(un v) <= b (sigma + 1) for some un simple beta lie in
        some X of a codimension-one wall;
    (3) X at sigma lies in R at f sigma or in some codimension-one X at f sigma.
    Margins are differences of the defining inequalities (negative = violated).
    """
    if sigma <= 10:
        raise ValueError("sigma must exceed 10")
    consts = consts or choose_region_constants(rs)
    geo = RegionGeometry(rs)
    reg = Regions(geo, consts)
    rng = np.random.default_rng(seed)
    rep = RegionReport(rs.alg.label, float(sigma), int(samples), consts.to_dict())
    viol = {"1": 0, "2": 0, "3": 0}
    worst = {"1": math.inf, "2": math.inf, "3": math.inf}
    for w in geo.walls:
        key = w.key
        a, b = consts.a[key], consts.b[key]
        bkeys = boundary_keys(key, geo.rank)
        # S samples: un coordinates in [b sigma, 3 b sigma]
        v = _sample(geo, key, samples, a * sigma, b * sigma, 3 * b * sigma, rng)
        v = v[reg.margin_S(key, v, sigma) >= 0]
        al = geo.un_roots(key)
        if len(al):
            m1 = (v @ al.T).min(axis=1) - sigma
            worst["1"] = min(worst["1"], float(m1.min()))
            for p in v[m1 < 0]:
                with mpmath.workdps(HIGH_PRECISION_DPS):
                    pv = [mpmath.mpf(float(x)) for x in p]
                    vals = [mpmath.fdot(pv, [mpmath.mpf(float(x)) for x in r]) for r in al]
                    if min(vals) < sigma:
                        viol["1"] += 1
            _, uv = reg.parts(key, v)
            edge = (uv <= b * (sigma + 1)).any(axis=1)
            ve = v[edge]
            if len(ve):
                m2 = reg.margin_X_union(bkeys, ve, sigma)
                worst["2"] = min(worst["2"], float(m2.min()))
                for p in ve[m2 < 0]:
                    viol["2"] += int(_confirm_union(reg, key, bkeys, p, sigma, False))
        # X samples for property (3): un coordinates in [0, 3 b sigma]
        vx = _sample(geo, key, samples, a * (sigma - 1), 0.0, 3 * b * sigma, rng)
        vx = vx[reg.margin_X(key, vx, sigma) >= 0]
        for f in fs:
            m3 = np.maximum(reg.margin_R(key, vx, f * sigma), reg.margin_X_union(bkeys, vx, f * sigma))
            worst["3"] = min(worst["3"], float(m3.min()))
            for p in vx[m3 < 0]:
                viol["3"] += int(_confirm_union(reg, key, bkeys, p, f * sigma, True))
    rep.violations = viol
    rep.worst_margin = {k: (None if math.isinf(v) else v) for k, v in worst.items()}
    return rep
