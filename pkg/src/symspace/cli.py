"""Command-line front end: ``symspace <verb> [space] [options]``.

Options may also come from an INI file (``--config``) with one section per
verb; command-line flags override the file, which overrides the built-in
defaults.
"""

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import acceptance, catalog
from .einstein_spectra import (
    BUNDLES, SCHEMA_VERSION, VARIANTS, Sym2Basis, cusp_nullspace, normalization_scale,
    spectral_report,
)
from .geo_checks import choose_region_constants, sector_volume_check, verify_regions
from .heat_sim import ball_volumes, fit_decay, fit_power_correction, heat_model, run_heat
from .root_system import build_division_algebra_nilpotent, root_checks

DEFAULTS = {
    "bundle": "sym2",
    "variant": "einstein",
    "normalize": "unit_root",
    "dr": 0.05,
    "rmax": None,
    "t0": 0.05,
    "tmax": 12.0,
    "sample_every": 0.1,
    "sigma": 12.0,
    "samples": 100_000,
    "seed": 0,
    "n": 3,
    "emit": "json",
    "out": None,
}
FLOAT_KEYS = ("dr", "rmax", "t0", "tmax", "sample_every", "sigma")
INT_KEYS = ("samples", "seed", "n")
DIVISION_MODELS = {"R": "R", "C": "C", "H": "H", "O": "O"}


class UsageError(Exception):
    pass


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def dump_json(payload):
    return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def envelope(payload, command, normalization):
    out = {"schema_version": SCHEMA_VERSION, "command": command, "normalization": normalization}
    out.update(payload)
    return out


# ---------------------------------------------------------------- commands

def _space(key):
    try:
        catalog.entry(key)
    except catalog.CatalogError as e:
        raise UsageError(str(e)) from None
    return key


def _full_space(key):
    _space(key)
    if catalog.is_nilpotent_only(key):
        raise UsageError(f"{key} is only available as a nilpotent model (use the nullspace verb)")
    return key


def cmd_roots(opts):
    key = _full_space(opts.space)
    rs = catalog.roots(key)
    s = normalization_scale(rs)
    d = rs.to_dict()
    d["space"] = key
    d["checks"] = root_checks(rs)
    d["unit_root_scale"] = s
    payload = envelope(d, "roots", "killing")
    rows = [
        [i, int(m)] + [float(x) for x in r]
        for i, (r, m) in enumerate(zip(rs.distinct_roots, rs.multiplicities))
    ]
    header = ["root", "multiplicity"] + [f"a{j}" for j in range(rs.rank)]
    return payload, rows_to_csv(header, rows)


def cmd_spectra(opts):
    key = _full_space(opts.space)
    rep = spectral_report(catalog.roots(key), opts.bundle, opts.variant, opts.normalize)
    payload = envelope(rep.to_dict(), "spectra", opts.normalize)
    payload["space"] = key
    return payload, rep.to_csv()


def _nilpotent_for(key):
    """Catalog key or a division-algebra model such as C3 or O2."""
    if key in catalog.catalog():
        return catalog.nilpotent(key)
    if len(key) >= 2 and key[0] in DIVISION_MODELS and key[1:].isdigit():
        try:
            return build_division_algebra_nilpotent(key[0], int(key[1:]))
        except ValueError as e:
            raise UsageError(str(e)) from None
    raise UsageError(f"unknown space or model {key!r}")


def cmd_nullspace(opts):
    nd = _nilpotent_for(opts.space)
    N = cusp_nullspace(nd)
    nb = Sym2Basis(nd.dim)
    basis = [nb.to_coords(h).tolist() for h in N]
    payload = envelope(
        {"space": opts.space, "model": nd.label, "n_dim": nd.dim, "dimension": int(len(N)),
         "basis_sym2_coordinates": basis},
        "nullspace", "killing",
    )
    rows = []
    for k, h in enumerate(N):
        for i, j in zip(*np.nonzero(np.abs(h) > 1e-14)):
            if i <= j:
                rows.append([k, int(i), int(j), float(h[i, j])])
    return payload, rows_to_csv(["basis", "i", "j", "value"], rows)


def cmd_heatsim(opts):
    key = _full_space(opts.space)
    rs = catalog.roots(key)
    if rs.rank != 1:
        raise UsageError("heat simulation is implemented for rank-one spaces")
    if opts.variant == "einstein" and opts.bundle not in ("sym2",):
        raise UsageError("the Einstein variant acts on the sym2 bundle")
    model = heat_model(rs, opts.bundle, opts.variant)
    run = run_heat(model, opts.dr, opts.rmax, opts.t0, opts.tmax, opts.sample_every)
    try:
        fit = fit_decay(run.times, run.H1).to_dict()
        rate_k, power = fit_power_correction(run.times, run.H1)
        fit["with_power_correction"] = {"rate": rate_k, "power": power}
    except ValueError:
        fit = None
    vol = ball_volumes(run.alphas, run.r)
    env = np.max(np.abs(run.kmax) * vol[None, :], axis=1)
    d = run.manifest()
    d.update({
        "space": key, "bundle": opts.bundle, "variant": opts.variant,
        "T": opts.tmax, "sample_every": opts.sample_every,
        "lambda_L": model.lambda_c, "decay_fit": fit,
    })
    payload = envelope(d, "heatsim", "unit_root")
    rows = [[float(t), float(a), float(b), float(e)] for t, a, b, e in zip(run.times, run.H1, run.H2, env)]
    return payload, rows_to_csv(["t", "H1", "H2", "sup_envelope_ratio"], rows)


def cmd_regions(opts):
    key = _full_space(opts.space)
    rs = catalog.roots(key)
    consts = choose_region_constants(rs)
    rep = verify_regions(rs, consts, opts.sigma, opts.samples, opts.seed)
    payload = envelope(rep.to_dict(), "regions", "unit_root")
    c = consts.to_dict()
    rows = [[w, c["a"][w], c["b"][w]] for w in sorted(c["a"])]
    return payload, rows_to_csv(["wall", "a", "b"], rows)


def cmd_sector(opts):
    # --samples is the total number of random points, spread over the 900 sweep cases
    rep = sector_volume_check(n=opts.n, samples=max(1, opts.samples // 900), seed=opts.seed)
    payload = envelope({"n": opts.n, **rep.to_dict()}, "sector", "curvature_minus_one")
    return payload, rep.to_csv()


def cmd_verify_all(opts):
    results = acceptance.run_all()
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = envelope(
        {"passed": all(r.passed for r in results), "checks": [r.to_dict() for r in results]},
        "verify-all", "unit_root",
    )
    for r in payload["checks"]:
        r.pop("seconds")  # keep the output reproducible
    rows = [[r.number, r.title, "pass" if r.passed else "fail"] for r in results]
    return payload, rows_to_csv(["number", "check", "status"], rows)


COMMANDS = {
    "roots": cmd_roots,
    "spectra": cmd_spectra,
    "nullspace": cmd_nullspace,
    "heatsim": cmd_heatsim,
    "regions": cmd_regions,
    "sector": cmd_sector,
    "verify-all": cmd_verify_all,
}
NEEDS_SPACE = ("roots", "spectra", "nullspace", "heatsim", "regions")


# ---------------------------------------------------------------- parsing

def build_parser():
    p = argparse.ArgumentParser(prog="symspace", description="Symmetric-space spectra, heat kernels and geometric checks.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("space", nargs="?", help="catalog key (or division model such as C3 for nullspace)")
    p.add_argument("--space", dest="space_opt")
    p.add_argument("--bundle", choices=BUNDLES)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--normalize", choices=("killing", "unit_root"))
    p.add_argument("--dr", type=float)
    p.add_argument("--rmax", type=float, help="outer radius (default: sized from --tmax)")
    p.add_argument("--t0", type=float)
    p.add_argument("--tmax", type=float, help="run length, starting from t0")
    p.add_argument("--sample-every", dest="sample_every", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="dimension for the sector sweep")
    p.add_argument("--emit", choices=("json", "csv", "both"))
    p.add_argument("--out", help="directory for output files (default: stdout)")
    p.add_argument("--config", help="INI file with a section per command")
    return p


def _config_values(path, command):
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    vals = dict(cp.defaults())
    if cp.has_section(command):
        vals.update({k: v for k, v in cp.items(command)})
    out = {}
    for k, v in vals.items():
        k = k.replace("-", "_")
        if k not in DEFAULTS and k != "space":
            raise UsageError(f"unknown config key {k!r}")
        out[k] = v
    return out


def resolve(args):
    """Merge flags, config file and defaults into one namespace, then validate."""
    opts = argparse.Namespace(**DEFAULTS)
    opts.command = args.command
    opts.space = None
    if args.config:
        for k, v in _config_values(args.config, args.command).items():
            setattr(opts, k, v)
    for k in list(DEFAULTS) + ["space"]:
        v = getattr(args, k, None)
        if v is not None:
            setattr(opts, k, v)
    if args.space_opt is not None:
        opts.space = args.space_opt
    try:
        for k in FLOAT_KEYS:
            v = getattr(opts, k)
            if v is not None and v != "":
                setattr(opts, k, float(v))
            elif v == "":
                setattr(opts, k, None)
        for k in INT_KEYS:
            setattr(opts, k, int(getattr(opts, k)))
    except ValueError as e:
        raise UsageError(f"bad numeric value: {e}") from None
    validate(opts)
    return opts


def validate(o):
    if o.command in NEEDS_SPACE and not o.space:
        raise UsageError(f"{o.command} needs a space key; known: {', '.join(catalog.keys())}")
    if o.bundle not in BUNDLES:
        raise UsageError(f"unknown bundle {o.bundle!r}")
    if o.variant not in VARIANTS:
        raise UsageError(f"unknown variant {o.variant!r}")
    if o.normalize not in ("killing", "unit_root"):
        raise UsageError(f"unknown normalization {o.normalize!r}")
    if o.emit not in ("json", "csv", "both"):
        raise UsageError(f"unknown emit mode {o.emit!r}")
    if o.dr <= 0:
        raise UsageError("--dr must be positive")
    if o.t0 < 4 * o.dr ** 2:
        raise UsageError("--t0 must be at least 4 dr^2")
    if o.tmax <= 0:
        raise UsageError("--tmax (run length after t0) must be positive")
    if o.rmax is not None and o.rmax <= 10 * o.dr:
        raise UsageError("--rmax too small for the grid")
    if o.sample_every <= 0:
        raise UsageError("--sample-every must be positive")
    if o.sigma <= 10:
        raise UsageError("--sigma must exceed 10")
    if o.samples <= 0:
        raise UsageError("--samples must be positive")
    if o.n < 2:
        raise UsageError("--n must be at least 2")


def _stem(opts):
    parts = [opts.command.replace("-", "_")]
    if opts.space:
        parts.append(opts.space)
    if opts.command in ("spectra", "heatsim"):
        parts += [opts.bundle, opts.variant]
    return "_".join(parts)


def emit(opts, payload, text_csv, stdout):
    js = dump_json(payload)
    if opts.out:
        os.makedirs(opts.out, exist_ok=True)
        stem = os.path.join(opts.out, _stem(opts))
        if opts.emit in ("json", "both"):
            with open(stem + ".json", "w") as f:
                f.write(js)
        if opts.emit in ("csv", "both"):
            with open(stem + ".csv", "w") as f:
                f.write(text_csv)
        return
    if opts.emit in ("json", "both"):
        stdout.write(js)
    if opts.emit in ("csv", "both"):
        stdout.write(text_csv)


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        payload, text_csv = COMMANDS[opts.command](opts)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"symspace: error: {e}", file=sys.stderr)
        return 2
    emit(opts, payload, text_csv, stdout)
    if opts.command == "verify-all":
        return 0 if payload["passed"] else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
