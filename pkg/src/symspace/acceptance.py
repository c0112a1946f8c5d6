"""The acceptance suite: twelve numbered checks with fixed tolerances.

Each check returns a CheckResult; ``run_all`` runs a selection in order. The
heat-kernel checks share their runs through a small cache so that the
comparison-principle check can inspect every simulation without re-running.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from . import catalog
from .einstein_spectra import (
    Sym2Basis, block_check, bochner_lower_bound, bundle_rep, cusp_nullspace, normalization_scale,
    nullspace_cross_check, s_par_plain, spectral_report, s_wall_einstein,
)
from .geo_checks import choose_region_constants, sector_volume_check, verify_regions
from .heat_sim import fit_decay, heat_model, pointwise_envelope, run_heat
from .lie_core import check_algebra
from .linalg import jacobi_eigh, max_principal_angle
from .oracles import anticommuting_forms, quadratic_form_mismatch
from .root_system import (
    build_division_algebra_nilpotent, complex_structure, enumerate_walls, root_checks,
)


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title} ({self.seconds:.1f}s)"

    def to_dict(self):
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class HeatSettings:
    """Grid used by the heat-kernel checks; ``dr_fine`` is the refinement certificate."""

    dr: float = 0.1
    dr_fine: float = 0.05
    t0: float = 0.05
    T_one_forms: float = 12.0
    T_quadratic: float = 6.0
    T_einstein: float = 12.0
    sample_every: float = 0.1
    R_max: float | None = None  # None: sized from T


def _unit_min(rs, M):
    return float(jacobi_eigh(M)[0][0]) * normalization_scale(rs)


def check_one_forms_constants():
    out = {}
    ok = True
    for n in (2, 3, 4, 5):
        rs = catalog.roots(f"H{n}")
        lam_L = _unit_min(rs, s_par_plain(bundle_rep(rs, "one_forms")))
        lam_B = bochner_lower_bound(rs, "one_forms", "plain") * normalization_scale(rs)
        out[f"H{n}"] = {"lambda_L": lam_L, "lambda_B": lam_B}
        ok &= abs(lam_L - 1.0) <= 1e-8 and abs(lam_B - (n - 1)) <= 1e-8
    return ok, out


def check_quadratic_differentials():
    rs = catalog.roots("H2")
    lam = _unit_min(rs, s_par_plain(bundle_rep(rs, "sym2_traceless")))
    return abs(lam - 4.0) <= 1e-8, {"lambda_L": lam}


STRICT_SPACES = ("SL3", "SL4", "HH8")


def check_wall_positivity():
    out = {}
    ok = True
    for key in catalog.keys():
        if catalog.is_nilpotent_only(key):
            dim = int(cusp_nullspace(catalog.nilpotent(key)).shape[0])
            out[key] = {"nullspace_dim": dim}
            ok &= dim == 0
            continue
        rep = spectral_report(catalog.roots(key), "sym2", "einstein", "unit_root")
        mins = [v for wd in rep.walls for v in wd["blocks"].values() if v is not None]
        lo = min(mins)
        attains_zero = any(abs(v) <= 1e-8 for v in mins)
        out[key] = {"min_block": lo, "attains_zero": attains_zero}
        ok &= lo >= -1e-8
        if key in STRICT_SPACES:
            ok &= lo > 1e-4
        if catalog.has_hyperbolic_factor(key):
            ok &= attains_zero
    return ok, out


def _complex_angle(nd):
    J, short, _ = complex_structure(nd)
    N = cusp_nullspace(nd)
    nb = Sym2Basis(nd.dim)
    K = np.array([nb.to_coords(h) for h in N]).T.reshape(nb.dim, -1)
    ref = anticommuting_forms(J, short, nd.dim)
    return int(K.shape[1]), int(ref.shape[1]), float(max_principal_angle(K, ref))


def check_cusp_nullspace():
    out = {}
    ok = True
    for key, want in (("H3", 2), ("H4", 5), ("H5", 9), ("HH8", 0), ("OH16", 0)):
        dim = int(cusp_nullspace(catalog.nilpotent(key)).shape[0])
        out[key] = dim
        ok &= dim == want
    for label, nd in (
        ("CH4", catalog.nilpotent("CH4")),
        ("CH6", catalog.nilpotent("CH6")),
        ("C2-model", build_division_algebra_nilpotent("C", 2)),
        ("C3-model", build_division_algebra_nilpotent("C", 3)),
    ):
        kd, rd, ang = _complex_angle(nd)
        out[label] = {"kernel_dim": kd, "anticommuting_dim": rd, "angle": ang}
        ok &= kd == rd and ang <= 1e-6
    worst = 0.0
    for key in catalog.keys():
        if catalog.is_nilpotent_only(key):
            continue
        rs = catalog.roots(key)
        for w in enumerate_walls(rs):
            kd, cd, ang = nullspace_cross_check(rs, w)
            ok &= kd == cd
            worst = max(worst, float(ang))
    out["wall_cross_check_angle"] = worst
    ok &= worst <= 1e-6
    return ok, out


def check_sym2_bochner():
    out = {}
    ok = True
    for n in (2, 3, 4, 5):
        rs = catalog.roots(f"H{n}")
        lam = bochner_lower_bound(rs, "sym2", "einstein") * normalization_scale(rs)
        out[f"H{n}"] = lam
        ok &= abs(lam - (n - 2)) <= 1e-8
    return ok, out


_HEAT_CACHE = {}


def _heat_run(key, kind, variant, dr, T, hs):
    k = (key, kind, variant, dr, T, hs.t0, hs.R_max, hs.sample_every)
    if k not in _HEAT_CACHE:
        model = heat_model(catalog.roots(key), kind, variant)
        _HEAT_CACHE[k] = run_heat(model, dr, hs.R_max, hs.t0, T, hs.sample_every)
    return _HEAT_CACHE[k]


def _rate(run):
    return fit_decay(run.times, run.H1)


def check_one_forms_decay(hs):
    coarse = _rate(_heat_run("H3", "one_forms", "plain", hs.dr, hs.T_one_forms, hs))
    fine = _rate(_heat_run("H3", "one_forms", "plain", hs.dr_fine, hs.T_one_forms, hs))
    change = abs(fine.rate - coarse.rate) / abs(fine.rate)
    ok = 0.9 <= fine.rate <= 1.1 and 0.9 <= coarse.rate <= 1.1 and change <= 0.02
    return ok, {"rate": fine.rate, "rate_coarse": coarse.rate, "refinement_change": change,
                "dr": hs.dr_fine, "dr_coarse": hs.dr}


def check_quadratic_decay(hs):
    fit = _rate(_heat_run("H2", "sym2_traceless", "plain", hs.dr, hs.T_quadratic, hs))
    return 1.8 <= fit.rate <= 2.2, {"rate": fit.rate, "efoldings": fit.efoldings}


def check_einstein_decay(hs):
    run = _heat_run("H3", "sym2", "einstein", hs.dr, hs.T_einstein, hs)
    fit = _rate(run)
    _, growth = pointwise_envelope(run, 0.0)
    ok = -0.05 <= fit.rate <= 0.1 and growth <= 0.05
    return ok, {"rate": fit.rate, "envelope_growth": growth}


def heat_runs(hs):
    """The simulations behind checks 6-8, keyed by a readable label."""
    specs = [
        ("H3", "one_forms", "plain", hs.dr, hs.T_one_forms),
        ("H3", "one_forms", "plain", hs.dr_fine, hs.T_one_forms),
        ("H2", "sym2_traceless", "plain", hs.dr, hs.T_quadratic),
        ("H3", "sym2", "einstein", hs.dr, hs.T_einstein),
    ]
    return {f"{k}:{b}:{v}:dr={dr}": _heat_run(k, b, v, dr, T, hs) for k, b, v, dr, T in specs}


def check_comparison(hs):
    out = {}
    ok = True
    for label, run in heat_runs(hs).items():
        dom = run.checks["domination_ratio"]
        pos = run.checks["min_eig_over_norm"]
        out[label] = {"domination_ratio": dom, "min_eig_over_norm": pos}
        ok &= dom <= 1.02 and pos >= -1e-7
    return ok, out


def check_sector_sweep():
    rep = sector_volume_check()
    d = rep.to_dict()
    ok = rep.violations == 0 and math.isfinite(rep.fitted_C) and rep.ball_bound_ok
    return ok, d


def check_structure():
    out = {}
    ok = True
    rng = np.random.default_rng(7)
    worst = {"algebra": 0.0, "roots": 0.0, "offblock": 0.0, "symmetry": 0.0, "identity": 0.0, "oracle": 0.0}
    for key in catalog.keys():
        if catalog.is_nilpotent_only(key):
            continue
        alg = catalog.algebra(key)
        chk = check_algebra(alg, tol=1e-9)
        ok &= chk.passed
        worst["algebra"] = max(worst["algebra"], chk.jacobi_residual, chk.killing_residual, chk.sigma_residual)
        rs = catalog.roots(key)
        rc = root_checks(rs)
        ok &= rc["dimension_count"] and rc["simple_obtuse"] and rc["positive_in_simple_cone"]
        worst["roots"] = max(worst["roots"], rc["xy_bracket_residual"], rc["half_identity_residual"],
                             rc["root_space_bracket_residual"])
        walls = enumerate_walls(rs)
        for w in walls:
            br = block_check(s_wall_einstein(rs, w), w)
            worst["offblock"] = max(worst["offblock"], br.offblock_residual)
            worst["symmetry"] = max(worst["symmetry"], br.symmetry_residual)
            worst["identity"] = max(worst["identity"], br.identity_residual)
        worst["oracle"] = max(worst["oracle"], quadratic_form_mismatch(rs, walls, rng))
    out.update(worst)
    ok &= all(v <= 1e-9 for k, v in worst.items() if k != "oracle") and worst["oracle"] <= 1e-7
    return ok, out


def check_regions(samples=100_000, sigma=12.0, seed=0):
    out = {}
    ok = True
    for key in ("SL3", "H2xH2"):
        rs = catalog.roots(key)
        consts = choose_region_constants(rs)
        bad = consts.check(rs.rank)
        rep = verify_regions(rs, consts, sigma, samples, seed)
        out[key] = {"constraint_violations": len(bad), **rep.to_dict()}
        ok &= not bad and rep.passed
    return ok, out


CHECKS = {
    1: ("one-forms on real hyperbolic spaces: lambda_L = 1, Bochner bound n-1", check_one_forms_constants),
    2: ("traceless symmetric tensors on H2: lambda_L = 4", check_quadratic_differentials),
    3: ("wall blocks nonnegative; strict on higher rank; zero with hyperbolic factor", check_wall_positivity),
    4: ("cusp nullspace dimensions and complex-structure characterisation", check_cusp_nullspace),
    5: ("Bochner bound for symmetric tensors on Hn equals n-2", check_sym2_bochner),
    6: ("heat decay rate of one-forms on H3 near 1, grid independent", check_one_forms_decay),
    7: ("heat decay rate of traceless tensors on H2 near 2", check_quadratic_decay),
    8: ("Einstein heat kernel on H3 bounded, envelope without growth", check_einstein_decay),
    9: ("comparison kernel dominates, kernels stay positive", check_comparison),
    10: ("sector complement containment and volume bound", check_sector_sweep),
    11: ("structural identities and closed-form quadratic form", check_structure),
    12: ("region constants and covering properties", check_regions),
}
HEAT_CHECKS = (6, 7, 8, 9)


def run_check(number, heat=None):
    title, fn = CHECKS[number]
    t = time.perf_counter()
    if number in HEAT_CHECKS:
        ok, details = fn(heat or HeatSettings())
    else:
        ok, details = fn()
    return CheckResult(number, title, bool(ok), details, time.perf_counter() - t)


def run_all(numbers=None, heat=None):
    heat = heat or HeatSettings()
    return [run_check(n, heat) for n in (numbers or sorted(CHECKS))]
