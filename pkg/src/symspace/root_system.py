"""Restricted roots, simple roots, walls of the Weyl chamber, nilpotent structure."""

from dataclasses import dataclass, field
from itertools import combinations
import json

import numpy as np

from .division_algebras import DIMS, multiplication_table
from .linalg import gram_schmidt, null_space

CLUSTER_TOL = 1e-7
ROOT_TOL = 1e-6


def default_v0(rank):
    """Regular element of a in a-basis coordinates: (1, 1/pi, 1/pi^2, ...)."""
    return np.pi ** -np.arange(rank, dtype=float)


def maximal_abelian(alg):
    """Orthonormal basis (rows, g-coordinates) of a maximal abelian subspace of p.

    Grows a greedily: at each step the joint centralizer of a in p is computed
    and a vector of it orthogonal to a is added, until the centralizer is a itself.
    """
    P = np.eye(alg.dim)[: alg.p_dim]
    basis = []
    while True:
        if basis:
            A = np.vstack([alg.ad(v)[:, : alg.p_dim] for v in basis])
            Z = null_space(A).T  # p-coordinates
        else:
            Z = np.eye(alg.p_dim)
        Zg = Z @ P
        if basis:
            Bv = np.array(basis)
            Zg = Zg - (Zg @ Bv.T) @ Bv
        norms = np.linalg.norm(Zg, axis=1)
        if np.max(norms, initial=0.0) < 1e-9:
            break
        # a generic vector of the remaining centralizer, normalized
        w = (np.pi ** -np.arange(len(Zg), dtype=float)) @ Zg
        if np.linalg.norm(w) < 1e-9:
            w = Zg[np.argmax(norms)]
        w = w - sum((w @ b) * b for b in basis) if basis else w
        basis.append(w / np.linalg.norm(w))
    return np.array(basis)


def certify_maximal(alg, a_basis, tol=1e-9):
    """Residuals (commutator size, centralizer dimension excess) for a candidate a."""
    comm = 0.0
    for v, w in combinations(a_basis, 2):
        comm = max(comm, float(np.max(np.abs(alg.bracket(v, w)))))
    A = np.vstack([alg.ad(v)[:, : alg.p_dim] for v in a_basis])
    Z = null_space(A)
    return comm, Z.shape[1] - len(a_basis)


@dataclass
class RestrictedRootSystem:
    alg: object
    a_basis: np.ndarray  # (rank, dim) orthonormal vectors of a
    distinct_roots: np.ndarray  # (n_pos, rank) positive roots as covectors on a_basis
    multiplicities: np.ndarray
    x: np.ndarray  # (N, dim) orthonormal root vectors of n
    root_of: np.ndarray  # (N,) index into distinct_roots
    k0: np.ndarray  # (dim k0, dim)
    simple: list
    v0: np.ndarray
    checks: dict = field(default_factory=dict)

    @property
    def rank(self):
        return len(self.a_basis)

    @property
    def n_pos(self):
        return len(self.x)

    @property
    def roots(self):
        """Covector of each x_i (with repetition)."""
        return self.distinct_roots[self.root_of]

    @property
    def y(self):
        return self.x @ self.alg.sigma

    @property
    def p_vecs(self):
        return (self.x - self.y) / np.sqrt(2.0)

    @property
    def k_vecs(self):
        return (self.x + self.y) / np.sqrt(2.0)

    def sharp(self, covector):
        """alpha^# as a g-coordinate vector."""
        return np.asarray(covector) @ self.a_basis

    def simple_roots(self):
        return self.distinct_roots[self.simple]

    def simple_coefficients(self):
        """Coefficients of every positive root in the simple-root basis."""
        S = self.simple_roots()
        coef = np.linalg.lstsq(S.T, self.distinct_roots.T, rcond=None)[0].T
        return coef

    def to_dict(self):
        return {
            "space": self.alg.label,
            "rank": self.rank,
            "positive_roots": [
                {
                    "covector": [float(c) for c in r],
                    "multiplicity": int(m),
                    "simple": bool(i in self.simple),
                }
                for i, (r, m) in enumerate(zip(self.distinct_roots, self.multiplicities))
            ],
            "gram": np.round(self.distinct_roots @ self.distinct_roots.T, 14).tolist(),
            "v0": self.v0.tolist(),
            "checks": self.checks,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _cluster(vals, tol):
    groups = [[0]]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups


def _canonical_basis(Q):
    """Orthonormal basis of span(Q columns) obtained by projecting e_1, e_2, ..."""
    P = Q @ Q.T
    B = gram_schmidt(P, drop_tol=1e-7)
    return B[: Q.shape[1]]


def restricted_roots(alg, a_basis=None, v0=None):
    """Restricted root decomposition g = g_0 + sum g_alpha with respect to a."""
    if a_basis is None:
        a_basis = maximal_abelian(alg)
    a_basis = np.asarray(a_basis, dtype=float)
    r = len(a_basis)
    if v0 is None:
        v0 = default_v0(r)
    ads = np.array([alg.ad(v) for v in a_basis])
    scale = max(1.0, max(np.linalg.norm(A) for A in ads))
    for attempt in range(8):
        c = np.exp(-np.arange(r) * (0.77 + 0.31 * attempt)) * (1 + 0.1 * attempt)
        M = np.einsum("j,jab->ab", c, ads)
        vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
        clusters = _cluster(vals, CLUSTER_TOL * scale)
        covs, spaces, ok = [], [], True
        for g in clusters:
            Q = vecs[:, g]
            cov = np.array([np.trace(Q.T @ A @ Q) / len(g) for A in ads])
            res = max(np.linalg.norm(A @ Q - cov[j] * Q) for j, A in enumerate(ads))
            if res > 1e-7 * scale:
                ok = False
                break
            covs.append(cov)
            spaces.append(Q)
        if ok:
            break
    else:
        raise RuntimeError("could not separate restricted root spaces")

    pos = [i for i, cv in enumerate(covs) if cv @ v0 > ROOT_TOL]
    zero = [i for i, cv in enumerate(covs) if np.linalg.norm(cv) < ROOT_TOL]
    if len(zero) != 1:
        raise RuntimeError("zero root space not found")
    # order positive roots by their value on v0, then lexicographically
    pos.sort(key=lambda i: (round(covs[i] @ v0, 9), tuple(np.round(covs[i], 9))))
    distinct = np.array([covs[i] for i in pos]).reshape(len(pos), r)
    mult = np.array([spaces[i].shape[1] for i in pos], dtype=int)
    xs, root_of = [], []
    for n, i in enumerate(pos):
        B = _canonical_basis(spaces[i])
        xs.append(B)
        root_of += [n] * len(B)
    x = np.vstack(xs) if xs else np.zeros((0, alg.dim))
    Q0 = spaces[zero[0]]
    P0 = Q0 @ Q0.T
    k0 = gram_schmidt(P0[:, alg.p_dim:].T, drop_tol=1e-7)
    rs = RestrictedRootSystem(alg, a_basis, distinct, mult, x, np.array(root_of, dtype=int), k0, [], np.asarray(v0, float))
    rs.simple = simple_roots(rs)
    rs.checks = root_checks(rs)
    return rs


def simple_roots(rs):
    """Indices of positive roots that are not a sum of two positive roots."""
    R = rs.distinct_roots
    n = len(R)
    composite = set()
    for i in range(n):
        for j in range(i, n):
            s = R[i] + R[j]
            d = np.linalg.norm(R - s, axis=1)
            k = int(np.argmin(d)) if n else -1
            if n and d[k] < ROOT_TOL:
                composite.add(k)
    simple = [i for i in range(n) if i not in composite]
    if len(simple) != rs.rank:
        raise RuntimeError(f"found {len(simple)} simple roots for rank {rs.rank}")
    return simple


def root_checks(rs):
    alg = rs.alg
    out = {}
    r = rs.rank
    out["dimension_count"] = int(r + len(rs.k0) + 2 * rs.n_pos) == alg.dim
    # [x_i, y_i] = -alpha_i^#
    res = 0.0
    for xi, yi, cov in zip(rs.x, rs.y, rs.roots):
        res = max(res, float(np.max(np.abs(alg.bracket(xi, yi) + rs.sharp(cov)))))
    out["xy_bracket_residual"] = res
    # sum_l alpha_l(v) alpha_l(w) = <v, w>/2
    R = rs.roots
    out["half_identity_residual"] = float(np.max(np.abs(R.T @ R - 0.5 * np.eye(r)))) if r else 0.0
    S = rs.simple_roots()
    G = S @ S.T
    off = G - np.diag(np.diag(G))
    out["simple_obtuse"] = bool(np.all(off <= 1e-9))
    coef = rs.simple_coefficients()
    out["positive_in_simple_cone"] = bool(np.all(coef > -1e-9)) and bool(np.allclose(coef, np.round(coef), atol=1e-8))
    out["x_orthonormal_residual"] = float(np.max(np.abs(rs.x @ rs.x.T - np.eye(rs.n_pos)))) if rs.n_pos else 0.0
    out["root_space_bracket_residual"] = root_space_bracket_residual(rs)
    return out


def root_space_bracket_residual(rs):
    """Largest component of [x_i, x_j] outside g_(alpha_i + alpha_j), including the part outside n."""
    alg = rs.alg
    X = rs.x
    if len(X) == 0:
        return 0.0
    br = np.einsum("ia,jb,abc->ijc", X, X, alg.structure)
    T = np.einsum("ijc,kc->ijk", br, X)
    outside_n = float(np.max(np.abs(br - np.einsum("ijk,kc->ijc", T, X))))
    R = rs.roots
    target = R[:, None, None, :] + R[None, :, None, :] - R[None, None, :, :]
    wrong = np.linalg.norm(target, axis=3) > ROOT_TOL
    return max(outside_n, float(np.max(np.abs(T[wrong]), initial=0.0)))


@dataclass
class WallDecomposition:
    key: tuple  # positions (within rs.simple) of the simple roots spanning ov a
    ov_roots: list  # indices into distinct_roots
    un_roots: list
    ov_a: np.ndarray  # (d, rank) orthonormal basis of ov a in a_basis coordinates
    un_a: np.ndarray
    frame: np.ndarray  # (p_dim, dim) orthonormal frame of p adapted to the splitting
    groups: dict  # name -> frame indices: ov_a, ov_root, un_a, un_root
    ov_x: list  # indices of x_i whose root lies in ov
    un_x: list

    @property
    def name(self):
        return "ov[" + ",".join(str(k) for k in self.key) + "]"

    @property
    def ov_indices(self):
        return np.r_[self.groups["ov_a"], self.groups["ov_root"]].astype(int)

    @property
    def un_indices(self):
        return np.r_[self.groups["un_a"], self.groups["un_root"]].astype(int)

    def to_dict(self):
        return {
            "key": list(self.key),
            "name": self.name,
            "ov_roots": list(self.ov_roots),
            "un_roots": list(self.un_roots),
            "dim_ov_a": len(self.ov_a),
            "dim_un_a": len(self.un_a),
            "dim_ov_p": int(len(self.ov_indices)),
            "dim_un_p": int(len(self.un_indices)),
        }


def wall(rs, key):
    """Wall decomposition for the subset ``key`` of simple-root positions."""
    key = tuple(sorted(key))
    r = rs.rank
    coef = rs.simple_coefficients()
    un_pos = [i for i in range(r) if i not in key]
    ov_roots, un_roots = [], []
    for n in range(len(rs.distinct_roots)):
        if np.all(np.abs(coef[n, un_pos]) < 1e-8):
            ov_roots.append(n)
        else:
            un_roots.append(n)
    S = rs.simple_roots()
    if key:
        ov_a = gram_schmidt(S[list(key)])
    else:
        ov_a = np.zeros((0, r))
    if len(ov_a):
        un_a = gram_schmidt(np.eye(r) - ov_a.T @ ov_a)
    else:
        un_a = np.eye(r)
    ov_a = ov_a.reshape(-1, r)
    un_a = un_a.reshape(-1, r)
    ov_x = [i for i, n in enumerate(rs.root_of) if n in ov_roots]
    un_x = [i for i, n in enumerate(rs.root_of) if n in un_roots]
    P = rs.p_vecs
    rows = [ov_a @ rs.a_basis, P[ov_x], un_a @ rs.a_basis, P[un_x]]
    sizes = [len(b) for b in rows]
    frame = np.vstack([b.reshape(-1, rs.alg.dim) for b in rows])
    edges = np.cumsum([0] + sizes)
    names = ["ov_a", "ov_root", "un_a", "un_root"]
    groups = {nm: np.arange(edges[i], edges[i + 1]) for i, nm in enumerate(names)}
    return WallDecomposition(key, ov_roots, un_roots, ov_a, un_a, frame, groups, ov_x, un_x)


def enumerate_walls(rs):
    """All 2^rank walls, ordered by the size of the ov simple set, then lexicographically."""
    r = rs.rank
    out = []
    for k in range(r + 1):
        for key in combinations(range(r), k):
            out.append(wall(rs, key))
    return out


def chamber_wall(rs):
    return wall(rs, ())


def origin_wall(rs):
    return wall(rs, tuple(range(rs.rank)))


@dataclass
class NilpotentData:
    label: str
    dim: int
    T: np.ndarray  # T[i, j, k]: coefficient of x_k in [x_i, x_j]
    roots: np.ndarray  # (dim, rank) root covector of each basis vector, orthonormal a-coordinates
    rank: int

    @property
    def root_gram(self):
        return self.roots @ self.roots.T

    def same_root(self):
        d = np.linalg.norm(self.roots[:, None, :] - self.roots[None, :, :], axis=2)
        return d < ROOT_TOL

    def graded_dims(self):
        keys = {}
        for r in self.roots:
            k = tuple(np.round(r / np.min(np.linalg.norm(self.roots, axis=1)), 6))
            keys[k] = keys.get(k, 0) + 1
        return sorted(keys.values())

    def to_dict(self):
        idx = np.argwhere(np.abs(self.T) > 1e-14)
        return {
            "label": self.label,
            "dim": self.dim,
            "rank": self.rank,
            "roots": self.roots.tolist(),
            "T": [[int(i), int(j), int(k), float(self.T[i, j, k])] for i, j, k in idx],
        }


def nilpotent_structure(rs):
    """T-symbols of n = sum of positive root spaces in the basis x_i."""
    alg = rs.alg
    X = rs.x
    N = len(X)
    br = np.einsum("ia,jb,abc->ijc", X, X, alg.structure)
    T = np.einsum("ijc,kc->ijk", br, X)
    resid = br - np.einsum("ijk,kc->ijc", T, X)
    if N and np.max(np.abs(resid)) > 1e-9:
        raise RuntimeError("n is not closed under the bracket")
    return NilpotentData(alg.label, N, T, rs.roots.copy(), rs.rank)


def t_identities(nd):
    """Residuals of sum_l T^l_{il} = 0 and sum_{jk} T^k_{ij} T^j_{i'k} = 0."""
    T = nd.T
    if nd.dim == 0:
        return 0.0, 0.0
    r1 = float(np.max(np.abs(np.einsum("ill->i", T))))
    r2 = float(np.max(np.abs(np.einsum("ijk,mkj->im", T, T))))
    return r1, r2


def division_root_length_sq(kind, n):
    """|alpha^#|^2 in Killing normalization for the hyperbolic space over ``kind``."""
    d = DIMS[kind]
    return 1.0 / (2.0 * (d * (n - 1) + 4 * (d - 1)))


def build_division_algebra_nilpotent(kind, n, alpha_sq=None):
    """n = K^{n-1} + im K with [v, w] = 2 im(v, w), scaled to Killing normalization.

    The scale is fixed by the holomorphic sectional curvature, which is four
    times the curvature of the planes containing the flat direction.
    """
    if kind not in DIMS:
        raise ValueError(f"unknown division algebra {kind!r}")
    if kind == "O" and n != 2:
        raise ValueError("the octonionic model exists only for n = 2")
    if n < 2:
        raise ValueError("need n >= 2")
    d = DIMS[kind]
    c = division_root_length_sq(kind, n) if alpha_sq is None else float(alpha_sq)
    M = multiplication_table(kind)
    conj = np.ones(d)
    conj[1:] = -1.0
    # im(conj(e_p) e_q) in the imaginary basis e_1..e_{d-1}
    prod = conj[:, None, None] * M  # conj(e_p) = conj[p] e_p
    im = prod[:, :, 1:]
    m1 = d * (n - 1)
    m2 = d - 1
    N = m1 + m2
    T = np.zeros((N, N, N))
    scale = 2.0 * np.sqrt(c / 2.0)
    for slot in range(n - 1):
        s = slice(slot * d, (slot + 1) * d)
        T[s, s, m1:] = scale * im
    roots = np.zeros((N, 1))
    roots[:m1, 0] = np.sqrt(c)
    roots[m1:, 0] = 2 * np.sqrt(c)
    return NilpotentData(f"{kind}H{n}-nilpotent", N, T, roots, 1)


def complex_structure(nd):
    """J on the alpha-part of a rank-one nilpotent algebra with one-dimensional 2alpha-part."""
    lengths = nd.roots[:, 0]
    short = np.where(lengths < 1.5 * lengths.min())[0]
    long_ = np.where(lengths >= 1.5 * lengths.min())[0]
    if len(long_) != 1:
        raise ValueError("complex structure needs a one-dimensional centre")
    J = nd.T[np.ix_(short, short, long_)][:, :, 0]
    J = J / np.sqrt(np.mean(np.sum(J * J, axis=1)))
    return J, short, long_


def bracket_singular_values(nd):
    """Sorted singular values of the bracket map Lambda^2(n) -> n."""
    N = nd.dim
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]
    if not pairs:
        return np.zeros(0)
    A = np.array([nd.T[i, j] for i, j in pairs])
    return np.sort(np.linalg.svd(A, compute_uv=False))
