"""Command-line interface.

Examples::

    nhrm ep-locate --variant base2d --delta 0.70711 --gamma 1.73205 --g 1
    nhrm winding --center 1.5708,1.5708 --radius 0.2
    nhrm field-map --grid 41 --out field.csv --svg field.svg
    nhrm crosscheck --nx 8 --ny 4 --delta 0.5 --gamma 1.0 --boundary pbc
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__
from .ep_finder import classify_phase, locate_eps
from .exceptions import DegenerateParams, LoopThroughEP, NHRMError, ParameterError
from .field import assign_charges, charge_params, circle_loop, field_f, kink_profile, winding_number
from .lattice import OPEN, PERIODIC, VARIANT_NAMES, ModelParams, Momentum, build_bloch, make_variant
from .oracle import crosscheck_spectra, min_gap_scan
from .spectrum import band_pair
from .symmetry import symmetry_defect

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

# Hard defaults, applied after the config file and the command line.
DEFAULTS = {
    "variant": "base2d",
    "j": 1.0,
    "delta": 1.0 / math.sqrt(2.0),
    "gamma": math.sqrt(3.0),
    "g": 1.0,
    "t_d": 0.0,
    "v_pot": 0.0,
    "nx": 16,
    "ny": None,  # 16 for base2d, 1 otherwise
    "boundary": "pbc",
    "center": "1.5707963267948966,1.5707963267948966",
    "radius": 0.2,
    "grid": None,  # per-subcommand
    "samples": 256,
    "ky": math.pi / 2,
    "extent": 1.5,
    "format": None,  # per-subcommand
    "out": None,
    "svg": None,
    "workers": 1,
}

FIELD_TO_FLAG = {
    "j": "--j",
    "delta": "--delta",
    "gamma": "--gamma",
    "g": "--g",
    "n_cells": "--nx",
    "n_chains": "--ny",
    "boundary_y": "--boundary",
    "variant": "--variant",
    "grid_n": "--grid",
    "n_samples": "--samples",
    "loop": "--center",
}

GRID_DEFAULT = {"phase-scan": 200, "field-map": 41, "perturb-report": 256}
META_KEYS = {
    "phase-scan": ("grid", "extent"),
    "field-map": ("grid",),
    "winding": ("center", "radius", "samples"),
    "spectrum": ("samples", "ky"),
    "kink": ("samples",),
    "perturb-report": ("grid",),
}
FORMAT_DEFAULT = {"phase-scan": "csv", "field-map": "csv", "spectrum": "csv"}


class ConfigError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _flag(field):
    return FIELD_TO_FLAG.get(field, f"--{field.replace('_', '-')}") if field else "(config)"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    m = common.add_argument_group("model (defaults: J=1, g=1, delta=1/sqrt(2), gamma=sqrt(3))")
    m.add_argument("--variant", choices=VARIANT_NAMES)
    m.add_argument("--j", type=float, help="hopping scale J (default 1)")
    m.add_argument("--delta", type=float, help="dimerization (default 1/sqrt(2))")
    m.add_argument("--gamma", type=float, help="gain/loss strength (default sqrt(3))")
    m.add_argument("--g", type=float, help="inter-chain tunnelling (default 1)")
    m.add_argument("--t-d", dest="t_d", type=float, help="extra hopping for --variant hopping")
    m.add_argument("--v-pot", dest="v_pot", type=float, help="staggered potential for --variant potential")
    m.add_argument("--nx", type=int, help="unit cells along x (default 16)")
    m.add_argument("--ny", type=int, help="chains along y (default 16 for base2d, else 1)")
    m.add_argument("--boundary", choices=("pbc", "obc"), help="y boundary condition (default pbc)")
    o = common.add_argument_group("output")
    o.add_argument("--out", help="output file (default stdout)")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    o.add_argument("--workers", type=int, help="thread pool size for grid evaluations (default 1)")

    parser = argparse.ArgumentParser(prog="nhrm", description="Exceptional points and winding numbers "
                                     "of non-Hermitian coupled dimerized chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-scan", parents=[common], help="phase labels on a (delta, gamma/2J) grid")
    p.add_argument("--grid", type=int, help="points per axis (default 200)")
    p.add_argument("--extent", type=float, help="scan [-extent, extent] on both axes (default 1.5)")

    sub.add_parser("ep-locate", parents=[common], help="exceptional points with charges")

    p = sub.add_parser("field-map", parents=[common], help="auxiliary field on a k-grid")
    p.add_argument("--grid", type=int, help="points per axis (default 41)")
    p.add_argument("--svg", help="also write a quiver plot")

    p = sub.add_parser("winding", parents=[common], help="winding number around a circular loop")
    p.add_argument("--center", help="loop center kx,ky (default pi/2,pi/2)")
    p.add_argument("--radius", type=float, help="loop radius (default 0.2)")
    p.add_argument("--samples", type=int, help="initial loop vertices (default 256)")

    p = sub.add_parser("spectrum", parents=[common], help="band energies along kx")
    p.add_argument("--samples", type=int, help="kx samples (default 256)")
    p.add_argument("--ky", type=float, help="fixed ky for 2D models (default pi/2)")

    p = sub.add_parser("kink", parents=[common], help="field profile and kinks of a chain")
    p.add_argument("--samples", type=int, help="kx samples (default 256)")

    p = sub.add_parser("perturb-report", parents=[common], help="EPs, gap floor and symmetry defect")
    p.add_argument("--grid", type=int, help="min-gap grid points per axis (default 256)")

    sub.add_parser("crosscheck", parents=[common], help="dense real-space vs Bloch spectrum")
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("--config", str(exc)) from exc
    if not isinstance(data, dict):
        raise ConfigError("--config", "top level must be a JSON object")
    out = {}
    for key, val in data.items():
        name = key.lstrip("-").replace("-", "_")
        if name not in DEFAULTS or name == "config":
            raise ConfigError(f"--{key.lstrip('-')}", "unknown key in config file")
        out[name] = val
    return out


def resolve_settings(args) -> dict:
    """Merge flags over config file over defaults."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    settings = {}
    for key, default in DEFAULTS.items():
        val = getattr(args, key, None)
        if val is None:
            val = cfg.get(key, default)
        settings[key] = val
    cmd = args.command
    if settings["grid"] is None:
        settings["grid"] = GRID_DEFAULT.get(cmd, 41)
    if settings["format"] is None:
        settings["format"] = FORMAT_DEFAULT.get(cmd, "json")
    if settings["ny"] is None:
        settings["ny"] = 16 if settings["variant"] == "base2d" else 1
    if settings["format"] not in ("csv", "json"):
        raise ConfigError("--format", "must be csv or json")
    if settings["boundary"] not in ("pbc", "obc"):
        raise ConfigError("--boundary", "must be pbc or obc")
    for key in ("j", "delta", "gamma", "g", "t_d", "v_pot", "radius", "ky", "extent"):
        try:
            settings[key] = float(settings[key])
        except (TypeError, ValueError):
            raise ConfigError(f"--{key.replace('_', '-')}", "must be a number") from None
    for key in ("nx", "ny", "grid", "samples", "workers"):
        val = settings[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
            raise ConfigError(f"--{key}", "must be an integer")
        settings[key] = int(val)
    if settings["workers"] < 1:
        raise ConfigError("--workers", "must be >= 1")
    if settings["grid"] < 2:
        raise ConfigError("--grid", "must be >= 2")
    if not settings["radius"] > 0:
        raise ConfigError("--radius", "must be positive")
    if settings["samples"] < 4:
        raise ConfigError("--samples", "must be >= 4")
    try:
        cx, cy = (float(s) for s in str(settings["center"]).split(","))
    except ValueError:
        raise ConfigError("--center", "expected kx,ky") from None
    settings["center"] = (cx, cy)
    return settings


def params_from_settings(s: dict) -> ModelParams:
    if s["variant"] != "hopping" and s["t_d"] != 0.0:
        raise ConfigError("--t-d", "only valid with --variant hopping")
    if s["variant"] != "potential" and s["v_pot"] != 0.0:
        raise ConfigError("--v-pot", "only valid with --variant potential")
    variant = make_variant(s["variant"], s["t_d"], s["v_pot"])
    return ModelParams(
        j=s["j"], delta=s["delta"], gamma=s["gamma"], g=s["g"],
        n_cells=s["nx"], n_chains=s["ny"],
        boundary_y=PERIODIC if s["boundary"] == "pbc" else OPEN,
        variant=variant,
    )


def params_dict(params: ModelParams) -> dict:
    d = asdict(params)
    d["variant"] = {"name": params.variant.name, **asdict(params.variant)}
    return d


def _pool_map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _kgrid(n):
    return [-math.pi + 2.0 * math.pi * i / n for i in range(n)]


# -- subcommands ---------------------------------------------------------------
# Each returns (payload, columns, rows); rows are lists matching columns.


def cmd_phase_scan(params, s):
    n, ext = s["grid"], s["extent"]
    axis = list(np.linspace(-ext, ext, n))
    pts = [(float(d), float(gm)) for gm in axis for d in axis]
    labels = _pool_map(lambda p: classify_phase(p[0], p[1]).value, pts, s["workers"])
    rows = [[d, gm, lab] for (d, gm), lab in zip(pts, labels)]
    return {"grid": n, "extent": ext}, ["delta", "gamma_over_2j", "region"], rows


def _ep_rows(params):
    recs = locate_eps(params)
    if params.gamma > 0 and recs:
        recs = assign_charges(params, recs)
    return [[r.k_c.kx, r.k_c.ky, r.residual, r.charge] for r in recs]


def cmd_ep_locate(params, s):
    rows = _ep_rows(params)
    total = sum(r[3] for r in rows if r[3] is not None)
    return {"count": len(rows), "charge_sum": total}, ["kx", "ky", "residual", "charge"], rows


def cmd_field_map(params, s):
    xs = _kgrid(s["grid"])
    ys = [0.0] if params.is_chain else xs
    ks = [Momentum(kx, ky) for ky in ys for kx in xs]
    samples = _pool_map(lambda k: field_f(params, k), ks, s["workers"])
    rows = []
    for smp in samples:
        b = smp.b
        rows.append([smp.k.kx, smp.k.ky, b[0].real, b[1].real, b[2].real, b[2].imag,
                     float(smp.f[0]), float(smp.f[1]), int(smp.at_ep)])
    cols = ["kx", "ky", "bx", "by", "bz_re", "bz_im", "fx", "fy", "at_ep"]
    if s["svg"]:
        eps = [] if params.is_chain else [r.k_c for r in locate_eps(params)]
        with open(s["svg"], "w", encoding="utf-8") as fh:
            fh.write(quiver_svg(samples, eps))
    return {"grid": s["grid"]}, cols, rows


def cmd_winding(params, s):
    target = charge_params(params)
    loop = circle_loop(s["center"], s["radius"], s["samples"])
    w = winding_number(target, loop)
    return {"w": w}, None, None


def cmd_spectrum(params, s):
    ky = 0.0 if params.is_chain else s["ky"]
    rows = []
    for kx in _kgrid(s["samples"]):
        bp = band_pair(params, Momentum(kx, ky))
        rows.append([kx, ky, bp.eps.real, bp.eps.imag, -bp.eps.real, -bp.eps.imag, bp.classification.value])
    cols = ["kx", "ky", "re_eps_plus", "im_eps_plus", "re_eps_minus", "im_eps_minus", "class"]
    return {"samples": s["samples"]}, cols, rows


def cmd_kink(params, s):
    rep = kink_profile(params, s["samples"])
    rows = [[smp.k.kx, float(smp.f[0]), float(smp.f[1]), int(smp.at_ep)] for smp in rep.samples]
    return {"kink_positions": list(rep.kink_positions)}, ["kx", "fx", "fy", "at_ep"], rows


def cmd_perturb_report(params, s):
    try:
        eps = _ep_rows(params)
    except DegenerateParams:
        eps = None
    gap, arg = min_gap_scan(params, max(16, s["grid"]))
    defect = symmetry_defect(build_bloch(params, arg))
    payload = {
        "eps": None if eps is None else [dict(zip(["kx", "ky", "residual", "charge"], r)) for r in eps],
        "min_gap": gap,
        "argmin": [arg.kx, arg.ky],
        "symmetry_defect": defect,
    }
    return payload, None, None


def cmd_crosscheck(params, s):
    rep = crosscheck_spectra(params)
    payload = {"matched": rep.matched, "max_pairing_distance": rep.max_pairing_distance,
               "n_levels": rep.n_levels}
    return payload, None, None


COMMANDS = {
    "phase-scan": cmd_phase_scan,
    "ep-locate": cmd_ep_locate,
    "field-map": cmd_field_map,
    "winding": cmd_winding,
    "spectrum": cmd_spectrum,
    "kink": cmd_kink,
    "perturb-report": cmd_perturb_report,
    "crosscheck": cmd_crosscheck,
}


# -- output --------------------------------------------------------------------


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def render(command, params, settings, payload, cols, rows) -> str:
    meta = {"command": command, "version": __version__, "params": params_dict(params)}
    for key in META_KEYS.get(command, ()):
        meta[key] = list(settings[key]) if key == "center" else settings[key]
    if settings["format"] == "json":
        doc = {"meta": meta, **payload}
        if cols is not None:
            doc["rows"] = [dict(zip(cols, r)) for r in rows]
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    if cols is None:
        flat = {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in payload.items()}
        wr.writerow(list(flat))
        wr.writerow([_cell(v) for v in flat.values()])
    else:
        wr.writerow(cols)
        for r in rows:
            wr.writerow([_cell(v) for v in r])
    return buf.getvalue()


def quiver_svg(samples, eps, size=600, margin=30) -> str:
    """Static quiver plot of F; EPs are drawn as red squares."""
    ks = np.array([[s.k.kx, s.k.ky] for s in samples])
    fs = np.array([s.f for s in samples])
    mags = np.hypot(fs[:, 0], fs[:, 1])
    ref = float(np.percentile(mags, 95)) if len(mags) else 1.0
    ref = ref if ref > 0 else 1.0
    n = max(2, int(round(math.sqrt(len(samples)))))
    cell = (size - 2 * margin) / n
    scale = 0.9 * cell / ref

    def px(kx, ky):
        x = margin + (kx + math.pi) / (2 * math.pi) * (size - 2 * margin)
        y = size - margin - (ky + math.pi) / (2 * math.pi) * (size - 2 * margin)
        return x, y

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="{margin}" y="{margin}" width="{size - 2 * margin}" height="{size - 2 * margin}" '
           'fill="none" stroke="black"/>']
    for (kx, ky), (fx, fy), s in zip(ks, fs, samples):
        if s.at_ep:
            continue
        x0, y0 = px(kx, ky)
        x1, y1 = x0 + scale * fx, y0 - scale * fy
        out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                   'stroke="steelblue" stroke-width="1"/>')
        out.append(f'<circle cx="{x1:.2f}" cy="{y1:.2f}" r="1.2" fill="steelblue"/>')
    for k in eps:
        x, y = px(k.kx, k.ky)
        out.append(f'<rect x="{x - 4:.2f}" y="{y - 4:.2f}" width="8" height="8" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = resolve_settings(args)
        params = params_from_settings(settings)
        payload, cols, rows = COMMANDS[args.command](params, settings)
        text = render(args.command, params, settings, payload, cols, rows)
    except ConfigError as exc:
        print(f"nhrm: error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (ParameterError, DegenerateParams) as exc:
        print(f"nhrm: error: {_flag(exc.field)}: {exc}", file=stderr)
        return EXIT_CONFIG
    except LoopThroughEP as exc:
        print(f"nhrm: error: --center/--radius: {exc}", file=stderr)
        return EXIT_CONFIG
    except NHRMError as exc:
        print(f"nhrm: internal check failed: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL

    if settings["out"]:
        with open(settings["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.command == "crosscheck" and not payload["matched"]:
        print("nhrm: crosscheck mismatch", file=stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
