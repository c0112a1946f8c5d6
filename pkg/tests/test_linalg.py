import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from symspace.linalg import gram_schmidt, jacobi_eigh, max_principal_angle, null_space, projector


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_jacobi_matches_lapack(A):
    S = 0.5 * (A + A.T)
    w, V = jacobi_eigh(S)
    assert np.allclose(w, np.linalg.eigvalsh(S), atol=1e-9 * max(1, np.abs(S).max()))
    assert np.allclose(V.T @ V, np.eye(6), atol=1e-10)
    assert np.allclose(V @ np.diag(w) @ V.T, S, atol=1e-9 * max(1, np.abs(S).max()))


def test_jacobi_ascending_and_diagonal():
    w, V = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert list(w) == [-1.0, 2.0, 3.0]
    assert np.allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])


def test_null_space_dimension():
    rng = np.random.default_rng(0)
    B = rng.normal(size=(3, 7))
    A = rng.normal(size=(5, 3)) @ B  # rank 3
    K = null_space(A)
    assert K.shape == (7, 4)
    assert np.abs(A @ K).max() < 1e-10


def test_gram_schmidt_drops_dependent():
    v = np.array([[1.0, 0, 0], [2.0, 0, 0], [1.0, 1.0, 0]])
    Q = gram_schmidt(v)
    assert Q.shape == (2, 3)
    assert np.allclose(Q @ Q.T, np.eye(2))


def test_gram_schmidt_with_gram_matrix():
    G = np.diag([4.0, 1.0])
    Q = gram_schmidt(np.eye(2), gram=G)
    assert np.allclose(Q @ G @ Q.T, np.eye(2))


def test_principal_angles():
    A = np.eye(4)[:, :2]
    assert max_principal_angle(A, A @ np.array([[0.0, 1.0], [1.0, 0.0]])) < 1e-12
    B = np.eye(4)[:, [0, 2]]
    assert abs(max_principal_angle(A, B) - np.pi / 2) < 1e-12
    assert max_principal_angle(A, np.eye(4)[:, :3]) == np.pi / 2
    P = projector(A)
    assert np.allclose(P @ P, P)
