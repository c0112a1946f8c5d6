import json

import numpy as np
import pytest

from symspace import catalog
from symspace.einstein_spectra import (
    NotEinsteinError, PFrame, Sym2Basis, block_check, bochner_lower_bound, bundle_rep,
    check_einstein, curvature_operator, cusp_nullspace, lambda_wall_lower, normalization_scale,
    nullspace_cross_check, s_par, s_wall_einstein, s_wall_operator, spectral_report,
)
from symspace.linalg import jacobi_eigh
from symspace.oracles import hyperbolic_sectional
from symspace.root_system import build_division_algebra_nilpotent, chamber_wall, enumerate_walls, origin_wall

FULL_SPACES = [k for k in catalog.keys() if not catalog.is_nilpotent_only(k)]


def unit_min(rs, M):
    return jacobi_eigh(M)[0][0] * normalization_scale(rs)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_one_forms_on_real_hyperbolic(n):
    rs = catalog.roots(f"H{n}")
    assert unit_min(rs, s_par(bundle_rep(rs, "one_forms"), "plain")) == pytest.approx(1.0, abs=1e-8)
    assert bochner_lower_bound(rs, "one_forms", "plain") * normalization_scale(rs) == pytest.approx(n - 1, abs=1e-8)


def test_traceless_on_hyperbolic_plane():
    rs = catalog.roots("H2")
    assert unit_min(rs, s_par(bundle_rep(rs, "sym2_traceless"), "plain")) == pytest.approx(4.0, abs=1e-8)


@pytest.mark.parametrize("key", FULL_SPACES)
def test_killing_normalized_ricci(key):
    rs = catalog.roots(key)
    fr = PFrame(rs, chamber_wall(rs).frame)
    assert np.allclose(fr.ricci(), -0.5 * np.eye(fr.n), atol=1e-12)
    assert check_einstein(fr) == pytest.approx(-0.5)


def test_not_einstein_detected():
    rs = catalog.roots("H3")
    F = chamber_wall(rs).frame.copy()
    F[0] *= 2.0  # no longer orthonormal
    with pytest.raises(NotEinsteinError):
        check_einstein(PFrame(rs, F))


def test_constant_curvature_oracle():
    # <R(h), h> = K ((tr h)^2 - |h|^2) for constant sectional curvature K
    rs = catalog.roots("H4")
    fr = PFrame(rs, chamber_wall(rs).frame)
    basis = Sym2Basis(fr.n)
    R = curvature_operator(fr, basis)
    K = hyperbolic_sectional(rs)
    rng = np.random.default_rng(3)
    for _ in range(5):
        A = rng.normal(size=(fr.n, fr.n))
        h = A + A.T
        c = basis.to_coords(h)
        assert c @ R @ c == pytest.approx(K * (np.trace(h) ** 2 - np.sum(h * h)), rel=1e-10)


@pytest.mark.parametrize("key", ["H3", "CH4", "SL3", "H2xH2", "H3xSL3"])
def test_wall_operator_two_routes(key):
    # pairing formula against -sum rho(k)^2 - 2R on the same frame
    rs = catalog.roots(key)
    for w in enumerate_walls(rs):
        A = s_wall_einstein(rs, w)
        B = s_wall_operator(rs, w, "einstein", "sym2")
        assert np.allclose(A, B, atol=1e-12), w.name


@pytest.mark.parametrize("key", ["SL3", "SL4", "HH8", "H3xSL3"])
def test_block_structure(key):
    rs = catalog.roots(key)
    for w in enumerate_walls(rs):
        br = block_check(s_wall_einstein(rs, w), w)
        assert br.offblock_residual < 1e-12
        assert br.symmetry_residual < 1e-12
        assert br.identity_residual < 1e-12


def test_wall_values():
    h3 = catalog.roots("H3")
    lam_c, _ = lambda_wall_lower(h3, chamber_wall(h3))
    lam_0, _ = lambda_wall_lower(h3, origin_wall(h3))
    s = normalization_scale(h3)
    assert lam_c * s == pytest.approx(0.0, abs=1e-8)
    assert lam_0 * s == pytest.approx(1.0, abs=1e-8)
    sl3 = catalog.roots("SL3")
    vals = [lambda_wall_lower(sl3, w)[0] * normalization_scale(sl3) for w in enumerate_walls(sl3)]
    assert min(vals) == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("kind, n, dim", [("R", 3, 2), ("R", 4, 5), ("R", 5, 9), ("C", 2, 2), ("C", 3, 6), ("H", 2, 0)])
def test_division_nullspace_dims(kind, n, dim):
    nd = build_division_algebra_nilpotent(kind, n)
    N = cusp_nullspace(nd)
    assert N.shape[0] == dim
    for h in N:
        assert np.allclose(h, h.T)


def test_nullspace_matches_wall_kernel():
    for key in ("H4", "CH4", "H2xH2"):
        rs = catalog.roots(key)
        for w in enumerate_walls(rs):
            kd, cd, ang = nullspace_cross_check(rs, w)
            assert kd == cd and ang < 1e-8


def test_report_normalization_roundtrip():
    rs = catalog.roots("CH4")
    rep = spectral_report(rs, "sym2", "einstein", "killing")
    unit = rep.normalize("unit_root")
    assert unit.normalize("unit_root") is unit
    back = unit.normalize("killing")
    assert back.lambda_L == pytest.approx(rep.lambda_L)
    assert unit.lambda_B_lower == pytest.approx(rep.lambda_B_lower * rep.scale)
    with pytest.raises(ValueError):
        rep.normalize("other")


def test_report_serialization_deterministic():
    rs = catalog.roots("H3")
    a = spectral_report(rs, "sym2", "einstein").to_json()
    b = spectral_report(rs, "sym2", "einstein").to_json()
    assert a == b
    d = json.loads(a)
    assert d["schema_version"] == 1 and d["normalization"] == "unit_root"
    assert d["nullspace_dim"] == 2
    assert abs(d["lambda_L"]) < 1e-8
    csv_text = spectral_report(rs, "sym2", "einstein").to_csv()
    assert csv_text.splitlines()[0].startswith("space,bundle,variant,normalization")


def test_plain_sym2_bochner_is_clipped():
    rs = catalog.roots("H3")
    assert bochner_lower_bound(rs, "sym2", "plain") >= 0.0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sym2_bochner_on_real_hyperbolic(n):
    rs = catalog.roots(f"H{n}")
    assert bochner_lower_bound(rs, "sym2", "einstein") * normalization_scale(rs) == pytest.approx(n - 2, abs=1e-8)
