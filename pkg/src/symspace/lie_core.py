"""Real semisimple Lie algebras with a Cartan decomposition.

Every algebra is stored through its structure constants in a basis that is
orthonormal for the positive form ``B_theta(x, y) = -B(x, sigma y)``, where
``B`` is the Killing form and ``sigma(X) = -X^T`` the Cartan involution. The
first ``p_dim`` basis vectors span ``p`` (the -1 eigenspace of sigma), the
rest span ``k``.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from .linalg import gram_schmidt, null_space


@dataclass
class LieAlgebraData:
    label: str
    dim: int
    p_dim: int
    structure: np.ndarray  # C[i, j, k]: coefficient of e_k in [e_i, e_j]
    killing: np.ndarray
    sigma: np.ndarray
    matrices: np.ndarray | None = None  # defining representation, shape (dim, N, N)
    factor_labels: list = field(default_factory=list)
    factor_index: list = field(default_factory=list)  # basis indices of each simple summand

    @property
    def k_dim(self):
        return self.dim - self.p_dim

    @property
    def p_slice(self):
        return slice(0, self.p_dim)

    @property
    def k_slice(self):
        return slice(self.p_dim, self.dim)

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def ad(self, x):
        """Matrix of ad(x) acting on coordinate column vectors."""
        return np.einsum("i,ijk->kj", x, self.structure)

    def ad_basis(self):
        """ad(e_i) for every basis vector, shape (dim, dim, dim)."""
        return np.transpose(self.structure, (0, 2, 1))

    def killing_form(self, x, y):
        return x @ self.killing @ y

    def inner(self, x, y):
        """The positive form B_theta."""
        return -x @ self.killing @ (self.sigma @ y)

    def to_dict(self):
        return {
            "label": self.label,
            "dim": self.dim,
            "p_dim": self.p_dim,
            "structure": _sparse_triplets(self.structure),
            "factor_labels": list(self.factor_labels),
            "factor_index": [[int(i) for i in idx] for idx in self.factor_index],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d):
        dim = d["dim"]
        C = np.zeros((dim, dim, dim))
        for i, j, k, v in d["structure"]:
            C[i, j, k] = v
        alg = _finish(d["label"], C, d["p_dim"], None)
        alg.factor_labels = list(d.get("factor_labels", [d["label"]]))
        alg.factor_index = [np.array(i, dtype=int) for i in d.get("factor_index", [range(dim)])]
        return alg


def _sparse_triplets(C, tol=1e-14):
    idx = np.argwhere(np.abs(C) > tol)
    return [[int(i), int(j), int(k), float(C[i, j, k])] for i, j, k in idx]


def killing_from_structure(C):
    """B_il = tr(ad e_i ad e_l) = sum_jk C[i,j,k] C[l,k,j]."""
    return np.einsum("ijk,lkj->il", C, C)


def _finish(label, C, p_dim, mats):
    dim = C.shape[0]
    sigma = np.diag(np.r_[-np.ones(p_dim), np.ones(dim - p_dim)])
    B = killing_from_structure(C)
    return LieAlgebraData(label, dim, p_dim, C, B, sigma, mats, [label], [np.arange(dim)])


def _structure_from_matrices(mats):
    """Structure constants of a Frobenius-orthonormal matrix basis."""
    n = len(mats)
    flat = mats.reshape(n, -1)
    C = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            coef = flat @ br.ravel()
            resid = br.ravel() - coef @ flat
            if np.linalg.norm(resid) > 1e-9 * max(1.0, np.linalg.norm(br)):
                raise ValueError("matrix span is not closed under the bracket")
            C[i, j] = coef
            C[j, i] = -coef
    return C


def from_matrices(label, spanning):
    """Build algebra data from matrices spanning a sigma-stable Lie algebra.

    The spanning set is split into symmetric (p) and antisymmetric (k) parts,
    orthonormalized, and then re-orthonormalized under B_theta.
    """
    spanning = np.asarray(spanning, dtype=float)
    N = spanning.shape[1]
    sym = 0.5 * (spanning + np.transpose(spanning, (0, 2, 1)))
    skew = 0.5 * (spanning - np.transpose(spanning, (0, 2, 1)))
    P = gram_schmidt(sym.reshape(len(sym), -1))
    K = gram_schmidt(skew.reshape(len(skew), -1))
    mats = np.concatenate([P, K]).reshape(-1, N, N)
    p_dim = len(P)
    C = _structure_from_matrices(mats)
    B = killing_from_structure(C)
    sigma = np.diag(np.r_[-np.ones(p_dim), np.ones(len(mats) - p_dim)])
    Btheta = -B @ sigma
    # Gram-Schmidt under B_theta inside p, then inside k
    T = np.zeros_like(B)
    for sl in (slice(0, p_dim), slice(p_dim, len(mats))):
        G = Btheta[sl, sl]
        L = np.linalg.cholesky(G)
        T[sl, sl] = np.linalg.inv(L).T
    Tinv = np.linalg.inv(T)
    C2 = np.einsum("ia,jb,ijk,ck->abc", T, T, C, Tinv)
    mats2 = np.einsum("ia,ixy->axy", T, mats)
    return _finish(label, C2, p_dim, mats2)


def _algebra_from_constraints(label, N, constraints):
    """Matrices X (N x N) with L(X) = 0 for every linear map L in constraints.

    The canonical elementary matrices are projected onto the solution space,
    which gives a deterministic spanning set.
    """
    E = np.eye(N * N).reshape(N * N, N, N)
    rows = []
    for L in constraints:
        rows.append(np.array([L(e).ravel() for e in E]).T)
    A = np.vstack(rows)
    Q = null_space(A)
    Pr = Q @ Q.T
    spanning = (E.reshape(N * N, -1) @ Pr).reshape(-1, N, N)
    keep = np.linalg.norm(spanning.reshape(len(spanning), -1), axis=1) > 1e-12
    return from_matrices(label, spanning[keep])


def _lorentz(n, block):
    d = np.ones(n + 1)
    d[-1] = -1.0
    return np.kron(np.diag(d), np.eye(block))


def build_so(n):
    """so(n,1), the isometry algebra of real hyperbolic n-space."""
    if n < 2:
        raise ValueError("so(n,1) requires n >= 2")
    J = _lorentz(n, 1)
    return _algebra_from_constraints(f"so({n},1)", n + 1, [lambda X: X.T @ J + J @ X])


def _complex_unit(m):
    return np.kron(np.eye(m), np.array([[0.0, -1.0], [1.0, 0.0]]))


def build_su(n):
    """su(n,1) realised on R^{2(n+1)} (complex entries as 2x2 real blocks)."""
    if n < 1:
        raise ValueError("su(n,1) requires n >= 1")
    m = n + 1
    J = _lorentz(n, 2)
    I = _complex_unit(m)
    cons = [
        lambda X: X.T @ J + J @ X,
        lambda X: X @ I - I @ X,
        lambda X: np.array([np.trace(X), np.trace(I.T @ X)]),
    ]
    return _algebra_from_constraints(f"su({n},1)", 2 * m, cons)


def _quaternion_right(unit):
    """Right multiplication by i or j on H = R^4 (basis 1, i, j, k)."""
    if unit == "i":
        return np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], float)
    if unit == "j":
        return np.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]], float)
    raise ValueError(unit)


def build_sp(n):
    """sp(n,1) realised on R^{4(n+1)}: H-linear maps commute with right multiplication."""
    if n < 1:
        raise ValueError("sp(n,1) requires n >= 1")
    m = n + 1
    J = _lorentz(n, 4)
    Ri = np.kron(np.eye(m), _quaternion_right("i"))
    Rj = np.kron(np.eye(m), _quaternion_right("j"))
    cons = [
        lambda X: X.T @ J + J @ X,
        lambda X: X @ Ri - Ri @ X,
        lambda X: X @ Rj - Rj @ X,
    ]
    return _algebra_from_constraints(f"sp({n},1)", 4 * m, cons)


def build_sl(n):
    """sl(n, R)."""
    if n < 2:
        raise ValueError("sl(n) requires n >= 2")
    return _algebra_from_constraints(f"sl({n})", n, [lambda X: np.array([np.trace(X)])])


def direct_sum(*algs):
    """Block-diagonal direct sum; the p-parts of all summands come first."""
    if not algs:
        raise ValueError("need at least one summand")
    dim = sum(a.dim for a in algs)
    p_dim = sum(a.p_dim for a in algs)
    # new index of each summand's basis vectors
    index = []
    p_off, k_off = 0, p_dim
    for a in algs:
        idx = np.r_[np.arange(p_off, p_off + a.p_dim), np.arange(k_off, k_off + a.k_dim)]
        index.append(idx)
        p_off += a.p_dim
        k_off += a.k_dim
    C = np.zeros((dim, dim, dim))
    for a, idx in zip(algs, index):
        C[np.ix_(idx, idx, idx)] = a.structure
    mats = None
    if all(a.matrices is not None for a in algs):
        Ns = [a.matrices.shape[1] for a in algs]
        N = sum(Ns)
        mats = np.zeros((dim, N, N))
        off = 0
        for a, idx, Na in zip(algs, index, Ns):
            mats[idx, off:off + Na, off:off + Na] = a.matrices
            off += Na
    label = " + ".join(a.label for a in algs)
    out = _finish(label, C, p_dim, mats)
    out.factor_labels = []
    out.factor_index = []
    for a, idx in zip(algs, index):
        for lab, sub in zip(a.factor_labels, a.factor_index):
            out.factor_labels.append(lab)
            out.factor_index.append(np.sort(idx[sub]))
    return out


def factor_p_indices(alg):
    """List of p-index arrays, one per simple summand (in order)."""
    return [idx[idx < alg.p_dim] for idx in alg.factor_index]


@dataclass
class AlgebraCheck:
    passed: bool
    jacobi_residual: float
    antisymmetry_residual: float
    killing_residual: float
    sigma_residual: float
    nondegenerate: bool

    def to_dict(self):
        return dict(self.__dict__)


def check_algebra(alg, tol=1e-10):
    """Structural checks: antisymmetry, Jacobi, B_theta orthonormality, sigma an automorphism."""
    C = alg.structure
    scale = max(1.0, np.max(np.abs(C)))
    anti = float(np.max(np.abs(C + np.transpose(C, (1, 0, 2)))))
    # [[e_i,e_j],e_k] + cyclic
    t1 = np.einsum("ijm,mkl->ijkl", C, C)
    jac = t1 + np.transpose(t1, (1, 2, 0, 3)) + np.transpose(t1, (2, 0, 1, 3))
    jac_res = float(np.max(np.abs(jac))) / scale
    B = killing_from_structure(C)
    Bt = -B @ alg.sigma
    kill_res = float(np.max(np.abs(Bt - np.eye(alg.dim))))
    s = np.diag(alg.sigma)
    sig_res = float(np.max(np.abs(C * s[None, None, :] - C * s[:, None, None] * s[None, :, None])))
    nondeg = bool(np.min(np.abs(np.linalg.eigvalsh(0.5 * (B + B.T)))) > 1e-10)
    ok = max(anti, jac_res, kill_res, sig_res) <= tol and nondeg
    return AlgebraCheck(bool(ok), jac_res, anti, kill_res, sig_res, nondeg)


def trace_form(alg):
    """tr(XY) in the defining representation (None without matrices)."""
    if alg.matrices is None:
        return None
    M = alg.matrices
    return np.einsum("ixy,jyx->ij", M, M)
