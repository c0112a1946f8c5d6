"""Multiplication tables of R, C, H and O by the Cayley-Dickson doubling."""

from functools import lru_cache

import numpy as np

DIMS = {"R": 1, "C": 2, "H": 4, "O": 8}


def _conj(x):
    y = -x.copy()
    y[0] = x[0]
    return y


def _mul(x, y):
    n = len(x)
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[:h], x[h:]
    c, d = y[:h], y[h:]
    # (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))
    return np.concatenate([_mul(a, c) - _mul(_conj(d), b), _mul(d, a) + _mul(b, _conj(c))])


@lru_cache(maxsize=None)
def multiplication_table(kind):
    """M[p, q, r]: coefficient of e_r in e_p e_q for the standard basis."""
    n = DIMS[kind]
    E = np.eye(n)
    M = np.zeros((n, n, n))
    for p in range(n):
        for q in range(n):
            M[p, q] = _mul(E[p], E[q])
    return M


def multiply(kind, x, y):
    return np.einsum("p,q,pqr->r", x, y, multiplication_table(kind))


def conjugate(x):
    return _conj(np.asarray(x, dtype=float))
