import math

import numpy as np
import pytest

from symspace import catalog
from symspace.geo_checks import (
    RegionConstants, RegionGeometry, Regions, ball_volume, boundary_keys, choose_region_constants,
    complement_volume, sector_case, sector_radius, sector_volume_check, verify_regions,
)


def test_ball_volume_small_radius():
    # 4/3 pi r^3 in the Euclidean limit
    r = 1e-3
    assert ball_volume([1.0, 1.0], r) == pytest.approx(4 / 3 * math.pi * r ** 3, rel=1e-5)
    assert ball_volume([1.0], 2.0) == pytest.approx(2 * math.pi * (math.cosh(2) - 1))
    assert ball_volume([1.0, 1.0], 0.0) == 0.0
    with pytest.raises(ValueError):
        ball_volume([1.0], -1.0)


def test_ball_volume_exponential_growth():
    alphas = [0.5, 0.5, 1.0]
    r = np.array([20.0, 21.0])
    v = [ball_volume(alphas, x) for x in r]
    assert math.log(v[1] / v[0]) == pytest.approx(sum(alphas), rel=1e-3)


def test_sector_radius_limits():
    assert sector_radius(0.0, math.pi / 2) == pytest.approx(math.asinh(1.0))
    assert sector_radius(5.0, 1.0) < sector_radius(0.0, 1.0)
    assert sector_radius(0.0, 0.1) > sector_radius(0.0, 1.0)


def test_complement_empty_for_wide_sector_far_away():
    # alpha near pi/2 and d large: the sector swallows the ball
    assert complement_volume(3, 2.0, 8.0, 1.5) == pytest.approx(0.0, abs=1e-6)


def test_complement_monotone_in_alpha():
    v = [complement_volume(3, 3.0, 0.0, al) for al in (0.1, 0.3, 0.5)]
    assert v[0] > v[1] > v[2] > 0


def test_complement_with_no_sector_is_whole_ball():
    # a vanishing half-angle removes only a null set
    vb = ball_volume([1.0, 1.0], 2.0)
    assert complement_volume(3, 2.0, 1.0, 1e-9) == pytest.approx(vb, rel=1e-6)


def test_sector_case_rejects_bad_angle():
    with pytest.raises(ValueError):
        sector_case(3, 1.0, 1.0, 2.0)


def test_sector_sweep_subset():
    rep = sector_volume_check(r0s=[1, 4, 10], ds=[0, 3, 8], alphas=[0.1, 0.5, 1.0], samples=50)
    assert rep.violations == 0
    assert rep.worst_margin > 0
    assert rep.ball_bound_ok
    assert rep.fitted_C < 5.0
    assert len(rep.to_csv().splitlines()) == 28


def test_sector_containment_detects_shrunk_radius():
    # the containment is nearly tight for a large ball: a 1% smaller radius fails
    c = sector_case(3, 10.0, 0.0, 0.1, samples=10)
    assert 0 < c.margin < 0.01
    assert c.max_distance > 0.99 * c.radius


@pytest.mark.parametrize("key", ["H3", "SL3", "SL4", "H2xH2", "H3xSL3"])
def test_region_constants_valid(key):
    consts = choose_region_constants(catalog.roots(key))
    assert consts.check(catalog.roots(key).rank) == []
    assert consts.C0 >= 0 and consts.C1 >= 1.0 - 1e-12


def test_region_constants_detect_broken_chain():
    rs = catalog.roots("SL3")
    c = choose_region_constants(rs)
    broken = RegionConstants(c.C0, c.C1, dict(c.a), dict(c.b))
    broken.a[(0,)] = 3.0
    assert any(b[0] == "a-chain" for b in broken.check(rs.rank))


def test_boundary_keys():
    assert boundary_keys((), 2) == [(0,), (1,)]
    assert boundary_keys((1,), 3) == [(0, 1), (1, 2)]


def test_rank_one_regions():
    rep = verify_regions(catalog.roots("H3"), samples=2000)
    assert rep.passed


def test_sl3_regions_pass():
    rep = verify_regions(catalog.roots("SL3"), samples=3000, fs=(1.0,))
    assert rep.passed
    assert all(v is None or v >= 0 for v in rep.worst_margin.values())


def test_sl3_regions_negative_control():
    # shrinking the wall constants breaks the covering property
    rs = catalog.roots("SL3")
    c = choose_region_constants(rs)
    small = {k: (2.0 if k else v) for k, v in c.a.items()}
    broken = RegionConstants(c.C0, c.C1, small, {k: c.C0 * small[k] + 2.0 for k in small})
    rep = verify_regions(rs, consts=broken, samples=3000, fs=(1.0,))
    assert not rep.passed


def test_sigma_must_exceed_ten():
    with pytest.raises(ValueError):
        verify_regions(catalog.roots("SL3"), sigma=9.0, samples=10)


def test_membership_margins_nested():
    rs = catalog.roots("SL3")
    geo = RegionGeometry(rs)
    reg = Regions(geo, choose_region_constants(rs))
    v = np.random.default_rng(1).normal(size=(500, 2)) * 100
    for key in geo.by_key:
        # R is contained in S is contained in the slab of X-type bounds
        r = reg.margin_R(key, v, 12.0)
        s = reg.margin_S(key, v, 12.0)
        assert np.all(s[r >= 0] >= 0)
