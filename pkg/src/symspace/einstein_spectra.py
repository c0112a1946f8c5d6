"""Curvature operators on homogeneous bundles over a symmetric space.

All operators act on the fiber at the base point, written in an orthonormal
frame of p. Symmetric two-tensors are stored as symmetric matrices with the
orthonormal basis e_k.e_k and sqrt(2) e_i.e_j (i < j); in this basis the
fiber metric is the identity.
"""

from dataclasses import dataclass, field
import csv
import io
import json

import numpy as np
from scipy.linalg import expm

from .linalg import gram_schmidt, jacobi_eigh, max_principal_angle, null_space
from .root_system import (
    ROOT_TOL,
    chamber_wall,
    enumerate_walls,
    nilpotent_structure,
    origin_wall,
)

SCHEMA_VERSION = 1
BUNDLES = ("trivial", "one_forms", "sym2", "sym2_traceless")
VARIANTS = ("plain", "einstein")


class NotEinsteinError(ValueError):
    pass


class PFrame:
    """An orthonormal frame of p together with the tensors needed on it."""

    def __init__(self, rs, frame):
        self.rs = rs
        self.F = np.asarray(frame, dtype=float)
        self.n = len(self.F)
        alg = rs.alg
        C = alg.structure
        # [F_a, F_b] in g-coordinates
        self._pp = np.einsum("ax,by,xyz->abz", self.F, self.F, C)
        # Rt[l, i, j, m] = <[[e_l, e_i], e_j], e_m>
        inner = np.einsum("liz,jw,zwu->liju", self._pp, self.F, C)
        self.Rt = np.einsum("liju,mu->lijm", inner, self.F)

    def ad_on_p(self, u):
        """Matrix of ad(u) restricted to p (u in k), in this frame."""
        C = self.rs.alg.structure
        img = np.einsum("x,by,xyz->bz", u, self.F, C)  # [u, F_b]
        return self.F @ img.T

    def rho_k(self):
        return np.array([self.ad_on_p(k) for k in self.rs.k_vecs]).reshape(-1, self.n, self.n)

    def rho_k0(self):
        return np.array([self.ad_on_p(k) for k in self.rs.k0]).reshape(-1, self.n, self.n)

    def ricci(self, idx=None):
        """Ric(v, w) = -sum_l <[[e_l, v], w], e_l>, optionally with l, v, w restricted to idx."""
        Rt = self.Rt
        if idx is not None:
            Rt = Rt[np.ix_(idx, idx, idx, idx)]
        return -np.einsum("lvwl->vw", Rt)


class Sym2Basis:
    """Orthonormal basis of symmetric n x n matrices ordered by pairs (i <= j)."""

    def __init__(self, n):
        self.n = n
        self.pairs = [(i, j) for i in range(n) for j in range(i, n)]
        U = np.zeros((len(self.pairs), n * n))
        for p, (i, j) in enumerate(self.pairs):
            M = np.zeros((n, n))
            if i == j:
                M[i, i] = 1.0
            else:
                M[i, j] = M[j, i] = 1.0 / np.sqrt(2.0)
            U[p] = M.ravel()
        self.U = U
        self.weight = np.array([1.0 if i == j else np.sqrt(2.0) for i, j in self.pairs])

    @property
    def dim(self):
        return len(self.pairs)

    def to_coords(self, h):
        return self.U @ np.asarray(h).ravel()

    def to_matrix(self, c):
        return (np.asarray(c) @ self.U).reshape(self.n, self.n)

    def restrict(self, full_op):
        """Matrix on Sym^2 of a linear map given on vec(n x n)."""
        return self.U @ full_op @ self.U.T

    def lift(self, A):
        """Induced action h -> A h + h A^T of an endomorphism A of p."""
        I = np.eye(self.n)
        return self.restrict(np.kron(A, I) + np.kron(I, A))

    def trace_vector(self):
        return self.to_coords(np.eye(self.n)) / np.sqrt(self.n)

    def traceless_basis(self):
        t = self.trace_vector()
        return gram_schmidt(np.eye(self.dim) - np.outer(t, t))


def curvature_operator(frame, basis=None):
    """R(h) = -sum_l e_l . [[e_l, v], w] on Sym^2 p, as a matrix in the Sym2 basis."""
    n = frame.n
    basis = basis or Sym2Basis(n)
    # M(h)_{lm} = sum_ij h_ij Rt[l, i, j, m]; R(h) = -(M + M^T)/2
    Mop = np.transpose(frame.Rt, (0, 3, 1, 2)).reshape(n * n, n * n)
    swap = np.eye(n * n).reshape(n, n, n, n).transpose(1, 0, 2, 3).reshape(n * n, n * n)
    full = -0.5 * (Mop + swap @ Mop)
    return basis.restrict(full)


def ricci_action(ric, basis):
    """h -> (Ric h + h Ric)/2 on Sym^2."""
    return 0.5 * basis.lift(ric)


def curvature_on_sym2(rs, frame=None):
    frame = frame or PFrame(rs, chamber_wall(rs).frame)
    return curvature_operator(frame)


def check_einstein(frame, tol=1e-8):
    ric = frame.ricci()
    lam = np.trace(ric) / frame.n
    res = float(np.max(np.abs(ric - lam * np.eye(frame.n))))
    if res > tol:
        raise NotEinsteinError(f"Ricci tensor is not a multiple of the metric (residual {res:.2e})")
    return lam


@dataclass
class BundleRep:
    kind: str
    fiber_dim: int
    rho_k: np.ndarray  # (N, f, f): action of k_i on the fiber
    rho_k0: np.ndarray  # (dim k0, f, f)
    curvature: np.ndarray | None  # R acting on the fiber (symmetric-tensor bundles), else None
    ricci: np.ndarray | None  # Ric on p
    fiber_metric: np.ndarray
    frame: object = None
    basis_labels: list = field(default_factory=list)

    def s_par(self):
        return -np.einsum("iab,ibc->ac", self.rho_k, self.rho_k) if len(self.rho_k) else np.zeros((self.fiber_dim,) * 2)


def bundle_rep(rs, kind, frame=None):
    """Action of k on the fiber at the base point for the named homogeneous bundle."""
    if kind not in BUNDLES:
        raise ValueError(f"unknown bundle kind {kind!r}; expected one of {BUNDLES}")
    frame = frame or PFrame(rs, chamber_wall(rs).frame)
    n = frame.n
    Ak = frame.rho_k()
    Ak0 = frame.rho_k0()
    ric = frame.ricci()
    if kind == "trivial":
        z = np.zeros((len(Ak), 1, 1))
        return BundleRep(kind, 1, z, np.zeros((len(Ak0), 1, 1)), None, ric, np.eye(1), frame, ["1"])
    if kind == "one_forms":
        labels = [f"e{i}" for i in range(n)]
        return BundleRep(kind, n, Ak, Ak0, None, ric, np.eye(n), frame, labels)
    basis = Sym2Basis(n)
    rho = np.array([basis.lift(A) for A in Ak]).reshape(-1, basis.dim, basis.dim)
    rho0 = np.array([basis.lift(A) for A in Ak0]).reshape(-1, basis.dim, basis.dim)
    R = curvature_operator(frame, basis)
    labels = [f"e{i}.e{j}" for i, j in basis.pairs]
    if kind == "sym2":
        return BundleRep(kind, basis.dim, rho, rho0, R, ric, np.eye(basis.dim), frame, labels)
    Q = basis.traceless_basis()  # rows
    conj = lambda M: Q @ M @ Q.T
    rho = np.array([conj(M) for M in rho]).reshape(-1, len(Q), len(Q))
    rho0 = np.array([conj(M) for M in rho0]).reshape(-1, len(Q), len(Q))
    labels = [f"t{i}" for i in range(len(Q))]
    return BundleRep(kind, len(Q), rho, rho0, conj(R), ric, np.eye(len(Q)), frame, labels)


def s_par_plain(rep):
    """S_par(e) = -sum_i k_i.k_i.e on the fiber."""
    return rep.s_par()


def s_par(rep, variant="plain"):
    S = rep.s_par()
    if variant == "einstein":
        if rep.curvature is None:
            raise ValueError("the Einstein variant needs a symmetric-tensor bundle")
        S = S - 2.0 * rep.curvature
    return S


def weyl_element(rep, rs):
    """Fiber action of exp(t k_1) for t rotating the first root plane by pi (rank one)."""
    if rs.rank != 1:
        raise ValueError("the radial Weyl reflection is defined here for rank one")
    t = np.pi / abs(rs.roots[0, 0])
    return expm(t * rep.rho_k[0])


def s_wall_einstein(rs, w, frame=None):
    """Einstein wall operator S_W on Sym^2 p, assembled from its pairing formula.

    2<S_W(v.w), v'.w'> sums, over k_m with root in the un part of the wall,
    the six bracket terms, and adds 2<[[v', v], w], w'> + 2<[[w', v], w], v'>.
    """
    frame = frame or PFrame(rs, w.frame)
    n = frame.n
    I = np.eye(n)
    Q = np.zeros((n, n, n, n))
    for m in w.un_x:
        A = frame.ad_on_p(rs.k_vecs[m])
        AtA = A.T @ A
        Q += np.einsum("ik,jl->ijkl", AtA, I)
        Q += np.einsum("il,jk->ijkl", AtA, I)
        Q += np.einsum("ik,jl->ijkl", I, AtA)
        Q += np.einsum("il,jk->ijkl", I, AtA)
        Q -= 2.0 * np.einsum("ki,lj->ijkl", A, A)
        Q -= 2.0 * np.einsum("li,kj->ijkl", A, A)
    Rt = frame.Rt
    Q += 2.0 * np.transpose(Rt, (1, 2, 0, 3))  # <[[e_k, e_i], e_j], e_l> at [i, j, k, l]
    Q += 2.0 * np.transpose(Rt, (1, 2, 3, 0))  # <[[e_l, e_i], e_j], e_k>
    basis = Sym2Basis(n)
    S = np.zeros((basis.dim, basis.dim))
    for p, (i, j) in enumerate(basis.pairs):
        for q, (k, l) in enumerate(basis.pairs):
            S[q, p] = 0.5 * basis.weight[p] * basis.weight[q] * Q[i, j, k, l]
    return S


def s_wall_operator(rs, w, variant="einstein", kind="sym2", frame=None):
    """S_W as -sum over un roots of rho(k_m)^2, minus 2R in the Einstein variant."""
    frame = frame or PFrame(rs, w.frame)
    rep = bundle_rep(rs, kind, frame)
    f = rep.fiber_dim
    S = np.zeros((f, f))
    for m in w.un_x:
        S -= rep.rho_k[m] @ rep.rho_k[m]
    if variant == "einstein":
        S -= 2.0 * rep.curvature
    return S


def bochner_zero_order(rs, kind, variant="einstein", frame=None):
    """Zero-order term A of the Bochner formula L = D*D + A on the fiber.

    One-forms: A = -Ric. Symmetric tensors, Einstein operator:
    A(h) = -R(h) - (Ric h + h Ric)/2. For the plain (rough) Laplacian on
    symmetric tensors the term is R(h) - (Ric h + h Ric)/2, and the trivial
    Bochner identity contributes 0 as well, so the lower bound is clipped at 0.
    """
    frame = frame or PFrame(rs, chamber_wall(rs).frame)
    ric = frame.ricci()
    if kind == "trivial":
        return np.zeros((1, 1))
    if kind == "one_forms":
        return -ric
    check_einstein(frame)
    basis = Sym2Basis(frame.n)
    R = curvature_operator(frame, basis)
    sign = -1.0 if variant == "einstein" else 1.0
    A = sign * R - ricci_action(ric, basis)
    if kind == "sym2_traceless":
        Q = basis.traceless_basis()
        A = Q @ A @ Q.T
    return A


def bochner_lower_bound(rs, kind, variant):
    A = bochner_zero_order(rs, kind, variant)
    lam = float(jacobi_eigh(A)[0][0])
    if variant == "plain" and kind != "one_forms":
        lam = max(lam, 0.0)
    return lam


def sym2_blocks(w):
    """Partition of the Sym^2 p basis (in the wall frame) into the five invariant blocks."""
    g = w.groups
    cls = {}
    for name in ("ov_a", "ov_root"):
        for i in g[name]:
            cls[int(i)] = "ov"
    for name in ("un_a", "un_root"):
        for i in g[name]:
            cls[int(i)] = name
    n = len(cls)
    basis = Sym2Basis(n)
    blocks = {"sym2_ov": [], "ov_un": [], "sym2_un_a": [], "un_a_cross": [], "sym2_un_perp": []}
    for p, (i, j) in enumerate(basis.pairs):
        a, b = cls[i], cls[j]
        if a == "ov" and b == "ov":
            blocks["sym2_ov"].append(p)
        elif a == "ov" or b == "ov":
            blocks["ov_un"].append(p)
        elif a == "un_a" and b == "un_a":
            blocks["sym2_un_a"].append(p)
        elif a == "un_root" and b == "un_root":
            blocks["sym2_un_perp"].append(p)
        else:
            blocks["un_a_cross"].append(p)
    return basis, {k: np.array(v, dtype=int) for k, v in blocks.items()}


@dataclass
class BlockReport:
    offblock_residual: float
    symmetry_residual: float
    identity_residual: float
    sizes: dict


def block_check(S, w):
    """Off-block size, self-adjointness and the identity on Sym^2 un a."""
    _, blocks = sym2_blocks(w)
    label = np.empty(S.shape[0], dtype=object)
    for k, idx in blocks.items():
        label[idx] = k
    mask = label[:, None] != label[None, :]
    off = float(np.max(np.abs(S[mask]))) if mask.any() else 0.0
    sym = float(np.max(np.abs(S - S.T)))
    ua = blocks["sym2_un_a"]
    ident = float(np.max(np.abs(S[np.ix_(ua, ua)] - np.eye(len(ua))))) if len(ua) else 0.0
    return BlockReport(off, sym, ident, {k: int(len(v)) for k, v in blocks.items()})


def cross_section_operator(rs, w, S=None, frame=None):
    """ov R(h) - (ov Ric h + h ov Ric)/2 + S_W(h) on Sym^2 ov p."""
    frame = frame or PFrame(rs, w.frame)
    S = s_wall_einstein(rs, w, frame) if S is None else S
    ov = w.ov_indices
    if len(ov) == 0:
        return np.zeros((0, 0))
    _, blocks = sym2_blocks(w)
    idx = blocks["sym2_ov"]
    # the ov indices lead the wall frame, so Sym2Basis(len(ov)) lists the same pairs in the same order
    assert np.array_equal(ov, np.arange(len(ov)))
    sub = PFrame.__new__(PFrame)
    sub.rs = rs
    sub.F = frame.F[ov]
    sub.n = len(ov)
    sub.Rt = frame.Rt[np.ix_(ov, ov, ov, ov)]
    sb = Sym2Basis(len(ov))
    Bbar = curvature_operator(sub, sb) - ricci_action(sub.ricci(), sb)
    return Bbar + S[np.ix_(idx, idx)]


def _min_eig(M):
    if M.shape[0] == 0:
        return None
    return float(jacobi_eigh(M)[0][0])


def lambda_wall_lower(rs, w, S=None):
    """Per-block lower bounds for the Einstein operator on the cross-section of wall w."""
    frame = PFrame(rs, w.frame)
    check_einstein(frame)
    S = s_wall_einstein(rs, w, frame) if S is None else S
    _, blocks = sym2_blocks(w)
    out = {}
    for name, idx in blocks.items():
        if name == "sym2_ov":
            M = cross_section_operator(rs, w, S, frame)
        else:
            M = S[np.ix_(idx, idx)]
        out[name] = _min_eig(M)
    vals = [v for v in out.values() if v is not None]
    return min(vals), out


def cusp_nullspace(nd, restrict=None):
    """Symmetric h on n satisfying the three cusp conditions.

    Returns an array (k, N, N) of h's orthonormal in the fiber metric. With
    ``restrict`` (indices into the basis of n) h is required to vanish outside
    those indices.
    """
    N = nd.dim
    basis = Sym2Basis(N)
    T = nd.T
    I = np.eye(N)
    # sum_i h_ai T[i,b,c] + sum_i h_bi T[a,i,c] - sum_i h_ci T[a,b,i]
    rows = []
    E = np.einsum("ax,yi->axyi", I, I)  # dh_{ai}/dh_{xy} = delta_ax delta_iy
    t1 = np.einsum("axyi,ibc->abcxy", E, T)
    t2 = np.einsum("bxyi,aic->abcxy", E, T)
    t3 = np.einsum("cxyi,abi->abcxy", E, T)
    L1 = (t1 + t2 - t3).reshape(N ** 3, N * N)
    rows.append(L1 @ basis.U.T)
    # sum_i h_ii alpha_i = 0
    diag = np.zeros((nd.rank, N * N))
    for i in range(N):
        diag[:, i * N + i] = nd.roots[i]
    rows.append(diag @ basis.U.T)
    # h_ab = 0 when alpha_a != alpha_b, and outside the restriction
    same = nd.same_root()
    allowed = np.ones(N, dtype=bool)
    if restrict is not None:
        allowed[:] = False
        allowed[np.asarray(restrict, dtype=int)] = True
    sel = np.zeros((basis.dim, basis.dim))
    for p, (a, b) in enumerate(basis.pairs):
        if not same[a, b] or not (allowed[a] and allowed[b]):
            sel[p, p] = 1.0
    rows.append(sel)
    A = np.vstack(rows)
    K = null_space(A)
    return np.array([basis.to_matrix(c) for c in K.T]).reshape(-1, N, N)


def nullspace_cross_check(rs, w, S=None):
    """Compare ker(S_W on Sym^2 un a-perp) with the cusp nullspace restricted to un roots."""
    S = s_wall_einstein(rs, w) if S is None else S
    basis, blocks = sym2_blocks(w)
    idx = blocks["sym2_un_perp"]
    nd = nilpotent_structure(rs)
    Ncusp = cusp_nullspace(nd, restrict=w.un_x)
    if len(idx) == 0:
        return 0, Ncusp.shape[0], 0.0 if Ncusp.shape[0] == 0 else np.pi / 2
    vals, vecs = np.linalg.eigh(S[np.ix_(idx, idx)])
    scale = max(1.0, float(np.max(np.abs(vals))))
    ker = vecs[:, np.abs(vals) < 1e-8 * scale]
    # express both in coordinates of Sym^2 over the x-basis of n
    Nn = nd.dim
    nb = Sym2Basis(Nn)
    un_root = w.groups["un_root"]
    pos_in_n = {int(f): int(x) for f, x in zip(un_root, w.un_x)}
    Kmat = np.zeros((nb.dim, ker.shape[1]))
    for c in range(ker.shape[1]):
        full = np.zeros(basis.dim)
        full[idx] = ker[:, c]
        h = basis.to_matrix(full)
        hn = np.zeros((Nn, Nn))
        for f1, x1 in pos_in_n.items():
            for f2, x2 in pos_in_n.items():
                hn[x1, x2] = h[f1, f2]
        Kmat[:, c] = nb.to_coords(hn)
    Cmat = np.array([nb.to_coords(h) for h in Ncusp]).T.reshape(nb.dim, -1)
    return ker.shape[1], Cmat.shape[1], max_principal_angle(Kmat, Cmat)


def normalization_scale(rs):
    """s = 1/|alpha_short^#|^2; for products the globally shortest root is used."""
    lengths = np.linalg.norm(rs.distinct_roots, axis=1)
    return 1.0 / float(np.min(lengths) ** 2)


@dataclass
class SpectralReport:
    space: str
    bundle: str
    variant: str
    normalization: str
    scale: float
    lambda_L: float
    lambda_B_lower: float
    s_par_eigenvalues: list
    walls: list = field(default_factory=list)
    nullspace_dim: int | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def lambda_0(self):
        return min(self.lambda_L, self.lambda_B_lower)

    def normalize(self, mode="unit_root"):
        """Return a copy with eigenvalues rescaled (idempotent)."""
        if mode == self.normalization:
            return self
        if mode not in ("killing", "unit_root"):
            raise ValueError(mode)
        f = self.scale if mode == "unit_root" else 1.0 / self.scale
        walls = []
        for wd in self.walls:
            wd = dict(wd)
            wd["lambda_W_lower"] = wd["lambda_W_lower"] * f
            wd["blocks"] = {k: (None if v is None else v * f) for k, v in wd["blocks"].items()}
            walls.append(wd)
        return SpectralReport(
            self.space, self.bundle, self.variant, mode, self.scale,
            self.lambda_L * f, self.lambda_B_lower * f,
            [v * f for v in self.s_par_eigenvalues], walls, self.nullspace_dim, dict(self.residuals),
        )

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "space": self.space,
            "bundle": self.bundle,
            "variant": self.variant,
            "normalization": self.normalization,
            "scale": self.scale,
            "lambda_L": self.lambda_L,
            "lambda_B_lower": self.lambda_B_lower,
            "lambda_0": self.lambda_0,
            "s_par_eigenvalues": list(self.s_par_eigenvalues),
            "walls": self.walls,
            "nullspace_dim": self.nullspace_dim,
            "residuals": self.residuals,
        }

    def to_json(self, **kw):
        return json.dumps(_clean(self.to_dict()), sort_keys=True, **kw)

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["space", "bundle", "variant", "normalization", "wall", "block", "min_eigenvalue"])
        head = [self.space, self.bundle, self.variant, self.normalization]
        wr.writerow(head + ["", "lambda_L", _fmt(self.lambda_L)])
        wr.writerow(head + ["", "lambda_B_lower", _fmt(self.lambda_B_lower)])
        for wd in self.walls:
            for k, v in sorted(wd["blocks"].items()):
                wr.writerow(head + [wd["name"], k, "" if v is None else _fmt(v)])
        return buf.getvalue()


def _fmt(x):
    return repr(float(x))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def spectral_report(rs, kind="sym2", variant="einstein", normalization="unit_root"):
    """Spectral constants for one bundle, including per-wall bounds where defined."""
    rep = bundle_rep(rs, kind)
    S = s_par(rep, variant)
    vals = jacobi_eigh(S)[0]
    lamB = bochner_lower_bound(rs, kind, variant)
    residuals = {"s_par_symmetry": float(np.max(np.abs(S - S.T)))}
    walls = []
    nulldim = None
    if kind == "sym2" and variant == "einstein":
        for w in enumerate_walls(rs):
            Sw = s_wall_einstein(rs, w)
            br = block_check(Sw, w)
            lam, blocks = lambda_wall_lower(rs, w, Sw)
            walls.append({
                "name": w.name,
                "key": list(w.key),
                "lambda_W_lower": lam,
                "blocks": blocks,
                "offblock_residual": br.offblock_residual,
                "identity_residual": br.identity_residual,
                "symmetry_residual": br.symmetry_residual,
            })
        nulldim = int(cusp_nullspace(nilpotent_structure(rs)).shape[0])
    else:
        for w in enumerate_walls(rs):
            if len(w.un_x) == 0 and len(w.un_a) == 0:
                lam = lamB
                blocks = {"bochner": lamB}
            else:
                Sw = s_wall_operator(rs, w, variant, kind) if kind != "trivial" else np.zeros((1, 1))
                lam = float(jacobi_eigh(Sw)[0][0])
                blocks = {"s_wall": lam}
            walls.append({"name": w.name, "key": list(w.key), "lambda_W_lower": lam, "blocks": blocks})
    rep_ = SpectralReport(
        rs.alg.label, kind, variant, "killing", normalization_scale(rs),
        float(vals[0]), float(lamB), [float(v) for v in vals], walls, nulldim, residuals,
    )
    return rep_.normalize(normalization)
