import math

import numpy as np
import pytest

from symspace import catalog
from symspace.heat_sim import (
    ball_volumes, cell_weights, coth_series, cosh_minus_one_over_sinh2, cosh_over_sinh2,
    default_rmax, evolve, fit_decay, green_l1, heat_model, init, inv_sinh2, invariant_basis,
    pointwise_envelope, radial_integral_bound, radial_weight, run_heat, scalar_model, step,
    volume_constant, weighted_norm,
)


@pytest.fixture(scope="module")
def h3():
    return catalog.roots("H3")


def test_series_helpers_continuous():
    x0 = np.array([0.999e-3, 1.001e-3])
    for f, exact in (
        (coth_series, lambda x: 1 / np.tanh(x)),
        (inv_sinh2, lambda x: 1 / np.sinh(x) ** 2),
        (cosh_over_sinh2, lambda x: np.cosh(x) / np.sinh(x) ** 2),
    ):
        v = f(x0)
        assert np.allclose(v, exact(x0), rtol=1e-9)
    assert cosh_minus_one_over_sinh2(np.array([1e-6]))[0] == pytest.approx(0.5)
    assert cosh_minus_one_over_sinh2(np.array([2.0]))[0] == pytest.approx((math.cosh(2) - 1) / math.sinh(2) ** 2)


def test_volume_constant_euclidean_limit():
    # V0 prod sinh(r) ~ 4 pi r^2 for H3
    assert volume_constant([1.0, 1.0]) * radial_weight([1.0, 1.0], [1e-4])[0] == pytest.approx(4 * math.pi * 1e-8, rel=1e-6)


def test_cell_weights_are_cell_averages():
    wf, V = cell_weights([1.0, 1.0], 0.1, 50)
    assert wf[0] == 0.0
    exact = (np.sinh(2 * 0.1 * np.arange(1, 51)) / 4 - 0.1 * np.arange(1, 51) / 2)
    cum = np.cumsum(V) * 0.1
    assert np.allclose(cum, exact, rtol=1e-12)


def test_invariant_basis_orthonormal(h3):
    m = heat_model(h3, "sym2", "einstein")
    Phi = invariant_basis(m)
    G = np.einsum("aij,bij->ab", Phi, Phi)
    assert np.allclose(G, np.eye(len(Phi)))
    for X in Phi:
        assert np.allclose(X, X.T)
        for k in m.k0:
            assert np.allclose(k @ X, X @ k, atol=1e-12)


def test_init_requires_resolved_gaussian(h3):
    m = heat_model(h3, "one_forms")
    with pytest.raises(ValueError):
        init(m, dr=0.1, R_max=20, t0=0.01)


def test_initial_mass_tends_to_one():
    m = scalar_model([1.0, 1.0])
    st = init(m, dr=0.002, R_max=3.0, t0=0.002)
    assert weighted_norm(st, 1) == pytest.approx(1.0, abs=0.01)


def test_initial_mass_grid_refinement():
    m = scalar_model([1.0, 1.0])
    a = weighted_norm(init(m, dr=0.05, R_max=20.0, t0=0.05), 1)
    b = weighted_norm(init(m, dr=0.025, R_max=20.0, t0=0.05), 1)
    assert abs(a - b) / b <= 0.005


@pytest.mark.parametrize("scheme", ["conservative", "central"])
def test_step_rejects_unstable_dt(scheme):
    st = init(scalar_model([1.0, 1.0]), dr=0.1, R_max=10.0, t0=0.05, scheme=scheme)
    with pytest.raises(ValueError):
        step(st, 2 * st.dt_max)


def test_scalar_mass_conserved():
    m = scalar_model([1.0, 1.0])
    run = run_heat(m, 0.1, None, 0.05, 6.0, 0.5, comparison=False)
    assert run.H1.max() / run.H1.min() - 1 < 0.01


def test_central_scheme_leaks_mass():
    # the ghost-node scheme loses O(dr^2) mass per unit time, the flux form does not
    m = scalar_model([1.0, 1.0])
    a = run_heat(m, 0.1, 20.0, 0.05, 2.0, 1.0, comparison=False, scheme="conservative")
    b = run_heat(m, 0.1, 20.0, 0.05, 2.0, 1.0, comparison=False, scheme="central")
    assert abs(a.H1[-1] / a.H1[0] - 1) < 1e-8
    assert 0.005 < 1 - b.H1[-1] / b.H1[0] < 0.1


def test_one_forms_rate_coarse(h3):
    run = run_heat(heat_model(h3, "one_forms"), 0.1, None, 0.05, 8.0, 0.1)
    fit = fit_decay(run.times, run.H1)
    assert 0.9 <= fit.rate <= 1.1
    assert run.checks["domination_ratio"] <= 1.02
    assert run.checks["min_eig_over_norm"] >= -1e-7


def test_rate_insensitive_to_t0(h3):
    m = heat_model(h3, "one_forms")
    r1 = fit_decay(*_series(run_heat(m, 0.1, 30.0, 0.05, 6.0, 0.1, comparison=False)))
    r2 = fit_decay(*_series(run_heat(m, 0.1, 30.0, 0.1, 6.0, 0.1, comparison=False)))
    assert abs(r1.rate - r2.rate) / r1.rate <= 0.02


def _series(run):
    return run.times, run.H1


def test_comparison_is_not_identical(h3):
    # the comparison kernel is strictly larger somewhere once the kernel has spread
    run = run_heat(heat_model(h3, "one_forms"), 0.1, 30.0, 0.05, 3.0, 0.5)
    last = run.kmax[-1] / run.comparison[-1]
    mask = run.comparison[-1] > 1e-8 * run.comparison[-1].max()
    assert last[mask].min() < 0.99
    assert last[mask].max() <= 1.02


def test_fit_recovers_rate():
    t = np.linspace(0, 20, 201)
    fit = fit_decay(t, 3.0 * np.exp(-1.5 * t))
    assert fit.rate == pytest.approx(1.5)
    assert not fit.window_too_short


def test_fit_log_correction_bias():
    t = np.linspace(10, 30, 201)
    fit = fit_decay(t, (t + 2) * np.exp(-t), window=(10, 30))
    assert 0.93 <= fit.rate <= 1.0


def test_fit_flags_short_window():
    t = np.linspace(0, 2, 50)
    assert fit_decay(t, np.exp(-0.5 * t)).window_too_short
    with pytest.raises(ValueError):
        fit_decay(t, -np.ones_like(t))


def test_green_l1_scalar():
    m = scalar_model([1.0, 1.0])
    run = run_heat(m, 0.1, None, 0.05, 10.0, 0.1, comparison=False)
    total, tail = green_l1(run.times, run.H1, -1.0)
    assert total == pytest.approx(run.H1[0] * math.exp(-0.05), rel=0.01)
    # positive exponent beyond the decay rate diverges
    _, tail = green_l1(run.times, run.H1, 0.5)
    assert math.isinf(tail)


def test_envelope_negative_control(h3):
    run = run_heat(heat_model(h3, "one_forms"), 0.1, None, 0.05, 8.0, 0.1, comparison=False)
    _, g_ok = pointwise_envelope(run, 1.0)
    _, g_bad = pointwise_envelope(run, 1.3)
    assert g_ok <= 0.05
    assert g_bad > 0.05


def test_radial_integral_bound(h3):
    run = run_heat(heat_model(h3, "one_forms"), 0.1, 30.0, 0.05, 4.0, 0.5, comparison=False)
    I, P = radial_integral_bound(run, 10.0, 1.0)
    assert I[0] <= run.H1[0] / 11.0
    assert np.all(np.isfinite(P))


def test_ball_volumes_monotone():
    r = np.linspace(0.1, 5, 20)
    v = ball_volumes([1.0, 1.0], r)
    assert np.all(np.diff(v) > 0)
    assert v[-1] == pytest.approx(4 * math.pi * (math.sinh(10) / 4 - 2.5), rel=1e-10)


def test_default_rmax_grows_with_time():
    assert default_rmax([1.0, 1.0], 1.0) == 30.0
    assert default_rmax([1.0, 1.0], 20.0) > 40.0


def test_manifest_and_csv(h3):
    run = run_heat(heat_model(h3, "one_forms"), 0.1, 20.0, 0.05, 1.0, 0.5)
    d = run.manifest()
    assert d["samples"] == len(run.times) == 3
    assert run.times[-1] == pytest.approx(1.05)  # runs from t0 for a duration T
    assert run.series_csv().splitlines()[0] == "t,H1,H2,sup_K"


def test_power_correction_fit():
    from symspace.heat_sim import fit_power_correction

    t = np.linspace(5, 30, 251)
    rate, k = fit_power_correction(t, 2.0 * t ** -1.5 * np.exp(-0.7 * t))
    assert rate == pytest.approx(0.7, abs=1e-8)
    assert k == pytest.approx(-1.5, abs=1e-6)
