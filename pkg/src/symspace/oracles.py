"""Independent closed-form references used to cross-check the matrix builds."""

import numpy as np

from .einstein_spectra import Sym2Basis, s_wall_einstein, sym2_blocks
from .linalg import null_space
from .root_system import nilpotent_structure


def sym2_un_quadratic_form(nd, un, ov, lam):
    """2<S h, h> for h diagonal on the un root vectors, from the T-symbols alone.

    ``un``, ``ov``: indices into the basis of n; ``lam``: diagonal entries on ``un``.
    """
    T = nd.T
    L = dict(zip(un, lam))
    s1 = sum((L[x] + L[y] - L[z]) ** 2 * T[x, y, z] ** 2 for x in un for y in un for z in un)
    s2 = sum(sum(L[a] * T[a, l, a] for a in un) ** 2 for l in range(nd.dim))
    s3 = sum(
        (T[a, l, b] + T[b, l, a]) ** 2 * (L[a] - L[b]) ** 2 for a in un for b in un for l in ov
    )
    v = sum(L[a] * nd.roots[a] for a in un)
    return 2 * s1 + 8 * s2 + s3 + 4 * float(v @ v)


def quadratic_form_mismatch(rs, walls, rng, trials=3):
    """Largest relative gap between the matrix S_W and the closed form, over walls and random h."""
    nd = nilpotent_structure(rs)
    worst = 0.0
    for w in walls:
        ur = w.groups["un_root"]
        if len(ur) == 0:
            continue
        S = s_wall_einstein(rs, w)
        basis, _ = sym2_blocks(w)
        for _ in range(trials):
            lam = rng.normal(size=len(ur))
            h = np.zeros((basis.n, basis.n))
            h[ur, ur] = lam
            c = basis.to_coords(h)
            lhs = 2 * c @ S @ c
            rhs = sym2_un_quadratic_form(nd, list(w.un_x), list(w.ov_x), lam)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def anticommuting_forms(J, short, N):
    """Symmetric h on R^N, supported on the ``short`` block, with J h + h J = 0 there.

    Returned as coordinate columns in Sym2Basis(N).
    """
    k = len(short)
    sb = Sym2Basis(k)
    mats = [sb.to_matrix(e) for e in np.eye(sb.dim)]
    A = np.array([(J @ M + M @ J).ravel() for M in mats]).T
    K = null_space(A)
    nb = Sym2Basis(N)
    cols = []
    for c in K.T:
        h = np.zeros((N, N))
        h[np.ix_(short, short)] = sb.to_matrix(c)
        cols.append(nb.to_coords(h))
    return np.array(cols).T.reshape(nb.dim, -1)


def hyperbolic_sectional(rs):
    """Sectional curvature of real hyperbolic space in Killing normalization: -|alpha|^2."""
    return -float(np.min(np.sum(rs.distinct_roots ** 2, axis=1)))
