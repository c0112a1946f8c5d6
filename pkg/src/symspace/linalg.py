"""Small dense linear-algebra helpers shared by the algebraic modules."""

import numpy as np

KERNEL_RTOL = 1e-8


def jacobi_eigh(M, tol=1e-12, max_sweeps=60):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||M||_F``. Returns ascending eigenvalues and orthonormal
    eigenvectors as columns.
    """
    A = np.array(M, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n and np.max(np.abs(A - A.T)) > 1e-8 * max(1.0, np.max(np.abs(A))):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    if n <= 1:
        return np.diag(A).copy(), V
    thresh = tol * np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta  # tiny rotation, avoids overflow in theta^2
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Vp = V[:, p].copy()
                V[:, p] = c * Vp - s * V[:, q]
                V[:, q] = s * Vp + c * V[:, q]
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def null_space(M, rtol=KERNEL_RTOL):
    """Orthonormal basis (columns) of the kernel of ``M``.

    Singular values below ``rtol`` times the largest one count as zero.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n)
    _, s, vt = np.linalg.svd(M)
    smax = s[0]
    rank = int(np.sum(s > rtol * smax))
    return vt[rank:].T.copy()


def gram_schmidt(vectors, gram=None, drop_tol=1e-9):
    """Orthonormalize the rows of ``vectors`` in order, dropping dependent ones.

    ``gram`` is the inner-product matrix (identity if omitted). Two passes of
    modified Gram-Schmidt are used for stability.
    """
    vectors = np.asarray(vectors, dtype=float)
    G = np.eye(vectors.shape[1]) if gram is None else np.asarray(gram, dtype=float)
    basis = []
    for v in vectors:
        w = v.copy()
        norm0 = np.sqrt(max(w @ G @ w, 0.0))
        if norm0 == 0:
            continue
        for _ in range(2):
            for b in basis:
                w = w - (b @ G @ w) * b
        nw = np.sqrt(max(w @ G @ w, 0.0))
        if nw > drop_tol * max(norm0, 1.0):
            basis.append(w / nw)
    return np.array(basis).reshape(len(basis), vectors.shape[1])


def projector(basis_cols):
    """Orthogonal projector onto the span of orthonormal columns."""
    Q = np.asarray(basis_cols, dtype=float)
    return Q @ Q.T


def max_principal_angle(A, B):
    """Largest principal angle between column spans (0 if both empty)."""
    from scipy.linalg import subspace_angles

    if A.shape[1] == 0 and B.shape[1] == 0:
        return 0.0
    if A.shape[1] != B.shape[1]:
        return np.pi / 2
    return float(np.max(subspace_angles(A, B)))
