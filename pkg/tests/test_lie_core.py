import numpy as np
import pytest

from symspace.lie_core import (
    LieAlgebraData, build_sl, build_so, build_sp, build_su, check_algebra, direct_sum,
    factor_p_indices, killing_from_structure, trace_form,
)


@pytest.mark.parametrize(
    "builder, n, dim, p_dim",
    [
        (build_so, 2, 3, 2),
        (build_so, 3, 6, 3),
        (build_so, 5, 15, 5),
        (build_su, 2, 8, 4),
        (build_su, 3, 15, 6),
        (build_sp, 2, 21, 8),
        (build_sl, 3, 8, 5),
        (build_sl, 4, 15, 9),
    ],
)
def test_dimensions_and_structure(builder, n, dim, p_dim):
    alg = builder(n)
    assert (alg.dim, alg.p_dim) == (dim, p_dim)
    chk = check_algebra(alg, tol=1e-9)
    assert chk.passed, chk


@pytest.mark.parametrize(
    "builder, n, ratio",
    [
        (build_so, 3, 2.0), (build_so, 4, 3.0), (build_su, 2, 3.0), (build_su, 3, 4.0),
        (build_sp, 2, 4.0), (build_sl, 3, 6.0), (build_sl, 4, 8.0),
    ],
)
def test_killing_is_multiple_of_trace_form(builder, n, ratio):
    # real trace form of the defining representation: n-1 for so(n,1), n+1 for su(n,1),
    # n+2 for sp(n,1) and 2n for sl(n)
    alg = builder(n)
    T = trace_form(alg)
    c = alg.killing / np.where(np.abs(T) > 1e-9, T, np.nan)
    vals = c[np.isfinite(c)]
    assert np.allclose(vals, vals[0])
    assert vals[0] == pytest.approx(ratio)


def test_killing_from_structure_matches_stored():
    alg = build_sl(3)
    assert np.allclose(killing_from_structure(alg.structure), alg.killing)


def test_perturbed_bracket_fails_jacobi():
    alg = build_so(3)
    C = alg.structure.copy()
    C[0, 1, 3] += 0.1
    C[1, 0, 3] -= 0.1
    bad = LieAlgebraData("bad", alg.dim, alg.p_dim, C, alg.killing, alg.sigma)
    chk = check_algebra(bad)
    assert not chk.passed
    assert chk.jacobi_residual > 1e-3 or chk.sigma_residual > 1e-3


def test_broken_antisymmetry_detected():
    alg = build_so(2)
    C = alg.structure.copy()
    C[0, 1, 2] += 1e-3
    chk = check_algebra(LieAlgebraData("bad", alg.dim, alg.p_dim, C, alg.killing, alg.sigma))
    assert chk.antisymmetry_residual > 1e-4
    assert not chk.passed


def test_direct_sum_layout():
    a, b = build_so(2), build_sl(3)
    s = direct_sum(a, b)
    assert s.dim == 11 and s.p_dim == 7
    assert check_algebra(s).passed
    ps = factor_p_indices(s)
    assert [list(p) for p in ps] == [[0, 1], [2, 3, 4, 5, 6]]
    # summands commute
    x, y = np.eye(s.dim)[0], np.eye(s.dim)[3]
    assert np.allclose(s.bracket(x, y), 0)


def test_serialization_roundtrip():
    alg = direct_sum(build_so(2), build_so(2))
    back = LieAlgebraData.from_dict(alg.to_dict())
    assert np.allclose(back.structure, alg.structure)
    assert back.factor_labels == alg.factor_labels
    assert check_algebra(back).passed


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_so(1)
    with pytest.raises(ValueError):
        build_sl(1)
