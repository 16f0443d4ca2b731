"""Command-line front end.

Complex numbers are given as re,im.  Every subcommand accepts --config with a
JSON object whose keys override the corresponding flags (option names with
dashes or underscores), plus an optional "tolerances" object.  Exit status is
0 on success, 1 on an engine error and 2 on a configuration error.
"""
import json
import logging
import sys

import click
import numpy as np

from .config import DEFAULT
from .errors import ConfigError, CubicNetError

log = logging.getLogger("cubicnet")


def parse_complex(text):
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ConfigError(f"complex must be [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"cannot read {text!r} as re,im")


def parse_pair(text, what):
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError:
        raise ConfigError(f"{what} must be lo,hi, got {text!r}")
    return a, b


def parse_grid(text):
    try:
        n, m = (int(v) for v in str(text).lower().split("x"))
    except ValueError:
        raise ConfigError(f"grid must be NxM, got {text!r}")
    if n < 1 or m < 2:
        raise ConfigError("grid needs N >= 1 lines and M >= 2 samples per line")
    return n, m


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _merge(kwargs, config):
    """Config values override flags."""
    out = dict(kwargs)
    for k, v in config.items():
        key = k.replace("-", "_")
        if key in ("tolerances", "differential", "command"):
            continue
        if key not in out:
            raise ConfigError(f"unknown config key {k!r}")
        out[key] = v
    return out


def _tolerances(pairs, config):
    over = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"tolerance override must be name=value, got {item!r}")
        k, v = item.split("=", 1)
        over[k.strip()] = v
    over.update(config.get("tolerances", {}))
    typed = {}
    for k, v in over.items():
        if not hasattr(DEFAULT, k):
            raise ConfigError(f"unknown tolerance {k!r}")
        kind = type(getattr(DEFAULT, k))
        try:
            typed[k] = kind(float(v)) if kind is int else kind(v)
        except ValueError:
            raise ConfigError(f"tolerance {k} needs a number, got {v!r}")
    try:
        return DEFAULT.override(**typed)
    except ValueError as e:
        raise ConfigError(str(e))


def _differential(opts, config, tol):
    from .differential import PolynomialCubicDifferential
    if "differential" in config:
        return PolynomialCubicDifferential.from_spec(config["differential"], tol=tol)
    poly = opts.get("poly")
    if poly:
        if isinstance(poly, str):
            poly = poly.split()
        return PolynomialCubicDifferential.polynomial([parse_complex(c) for c in poly], tol=tol)
    if opts.get("t") is None:
        raise ConfigError("give --t (normalized family) or --poly")
    return PolynomialCubicDifferential.normalized(parse_complex(opts.get("alpha") or "1,0"),
                                                  parse_complex(opts["t"]), tol=tol)


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _common(f):
    f = click.option("--config", "config_path", type=click.Path(), default=None,
                     help="JSON file whose keys override the flags.")(f)
    f = click.option("--tol", "tol_over", multiple=True, help="Tolerance override name=value.")(f)
    return f


def _differential_options(f):
    f = click.option("--t", default=None, help="Parameter t of the normalized family, re,im.")(f)
    f = click.option("--alpha", default="1,0", help="Scale alpha, re,im.")(f)
    f = click.option("--poly", multiple=True, help="Polynomial coefficient c0, c1, ... (repeat), re,im.")(f)
    return f


def _prepare(kwargs):
    config = _load_config(kwargs.pop("config_path"))
    tol_over = kwargs.pop("tol_over")
    opts = _merge(kwargs, config)
    tol = _tolerances(tol_over, config)
    return opts, config, tol


@click.group()
@click.option("-v", "--verbose", count=True)
def main_group(verbose):
    """Spectral networks of polynomial cubic differentials."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(levelname)s %(message)s")


@main_group.command()
@_differential_options
@click.option("--theta", default=0.0, type=float, help="Phase in radians.")
@click.option("--phase-frame", default="figure", type=click.Choice(["figure", "engine"]),
              help="Phases as quoted with published figures (normalized family) or engine phases.")
@click.option("--snap-window", default=5e-3, type=float,
              help="Snap to a saddle or tripod phase within this distance (0 disables).")
@click.option("--max-generation", default=8, type=int)
@click.option("--max-trajectories", default=400, type=int)
@click.option("--json", "json_out", default=None, help="Output path for the JSON dump (stdout if absent).")
@click.option("--svg", default=None, help="Output path for an SVG figure.")
@click.option("--frame", default="identity", type=click.Choice(["identity", "mobius"]))
@click.option("--core/--no-core", default=True, help="Compute and shade the spectral core.")
@_common
def network(**kwargs):
    """Build the spectral network at one phase."""
    from .network import build, find_double_trajectories
    from .render import render_svg
    from .spectralcore import SHORT, classify_core, compute_spectral_core
    opts, config, tol = _prepare(kwargs)
    for cap in ("max_generation", "max_trajectories"):
        if int(opts[cap]) < 1:
            raise ConfigError(f"{cap} must be at least 1")
    phi = _differential(opts, config, tol)
    off = _offset(phi, opts["phase_frame"])
    theta = float(opts["theta"]) - off
    snapped = _snap(phi, theta, float(opts["snap_window"]), tol)
    if snapped is not None:
        log.info("phase snapped from %.9g to %.9g", theta + off, snapped + off)
        theta = snapped
    net = build(phi, theta, max_generation=int(opts["max_generation"]),
                max_trajectories=int(opts["max_trajectories"]), tol=tol)
    doubles = find_double_trajectories(net)
    out = net.to_dict()
    out["theta_requested"] = float(opts["theta"])
    out["phase_frame"] = opts["phase_frame"]
    out["theta_frame"] = round(theta + off, 12)
    out["double_trajectories"] = [
        {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()
         if k in ("kind", "zeros", "trajectories")} for d in doubles]
    core = None
    if opts["core"] and phi.degree >= 1:
        try:
            core = compute_spectral_core(phi, theta, net, tol=tol)
            out["core"] = core.to_dict(phi)
            if phi.degree in (2, 3):
                name = classify_core(core, tol=tol)
                out["core_type"] = SHORT.get(name, name)
        except CubicNetError as e:
            log.warning("spectral core not available: %s", e)
            out["core"] = None
            out["core_error"] = f"{type(e).__name__}: {e}"
    _emit(out, opts["json_out"])
    if opts["svg"]:
        with open(opts["svg"], "w") as fh:
            fh.write(render_svg(net, core, doubles, frame=opts["frame"]))


@main_group.command()
@_differential_options
@click.option("--resolution", default=None, type=int, help="Also run a full phase sweep at this resolution.")
@click.option("--phase-frame", default="figure", type=click.Choice(["figure", "engine"]),
              help="Report phases as quoted with published figures or as engine phases.")
@click.option("--out", default=None, help="Output path (stdout if absent).")
@_common
def scan(**kwargs):
    """Cycle of special phases and core types over one period of the phase."""
    from .degeneration import cycle_json, find_saddles, find_tripods, scan_phases
    from .differential import reduce_phase
    opts, config, tol = _prepare(kwargs)
    phi = _differential(opts, config, tol)
    res = opts["resolution"]
    if res is not None and int(res) < 1:
        raise ConfigError("resolution must be at least 1")
    saddles = find_saddles(phi, sweep=res, tol=tol)
    tripods = find_tripods(phi, tol=tol) if phi.degree == 3 else []
    if phi.form == "NormalizedDegree3":
        _label_classes(phi, saddles, tripods)
    cycle = scan_phases(phi, resolution=res, tol=tol, saddles=saddles, tripods=tripods)
    off = _offset(phi, opts["phase_frame"])
    for c in cycle:
        if "type" in c:
            c["phase"] = reduce_phase(c["phase"] + off)
    _emit(cycle_json(cycle, phi), opts["out"])


def _snap(phi, theta, window, tol):
    """Nearest saddle or tripod phase within the window, as a phase near theta."""
    from .degeneration import find_saddles, find_tripods
    from .differential import phase_distance
    if window <= 0 or phi.degree < 2:
        return None
    degs = list(find_saddles(phi, tol=tol))
    if phi.degree == 3:
        degs += find_tripods(phi, tol=tol)
    best = None
    for d in degs:
        dist = phase_distance(d.phase, theta)
        if dist <= window and (best is None or dist < best[0]):
            best = (dist, d.phase)
    if best is None:
        return None
    # keep theta's branch of the angle
    d = (best[1] - theta + np.pi / 6) % (np.pi / 3) - np.pi / 6
    return theta + d


def _offset(phi, frame):
    from .differential import figure_phase_offset
    if frame not in ("figure", "engine"):
        raise ConfigError(f"unknown phase frame {frame!r}")
    return figure_phase_offset(phi) if frame == "figure" else 0.0


def _label_classes(phi, saddles, tripods):
    from .bps import central_charges, identify_class
    Z = central_charges(phi.t, phi.alpha)
    for d in list(saddles) + list(tripods):
        try:
            d.lattice_class = identify_class(d, Z)
        except CubicNetError as e:
            log.warning("no lattice class: %s", e)


@main_group.command()
@click.option("--t", required=False, default=None, help="Parameter t, re,im.")
@_common
def classify(**kwargs):
    """Chamber or wall label of t, with the angle triple."""
    from .walls import classify_chamber
    opts, config, tol = _prepare(kwargs)
    if opts.get("t") is None:
        raise ConfigError("give --t")
    lab = classify_chamber(parse_complex(opts["t"]), tol)
    _emit(lab.to_dict(), None)


@main_group.command()
@click.option("--grid", default="40x24", help="NxM: N vertical scan lines, M samples per line.")
@click.option("--k", "walls", multiple=True, type=int, help="Wall index 1..4 (repeat; all by default).")
@click.option("--out", default=None, help="Output path (stdout if absent).")
@click.option("--cache-dir", default=None, help="Wall cache directory (else CUBICNET_CACHE_DIR).")
@_common
def walls(**kwargs):
    """Trace the walls Delta_1..Delta_4 in the fundamental domain."""
    from .walls import trace_wall, wall_json
    opts, config, tol = _prepare(kwargs)
    n, m = parse_grid(opts["grid"])
    ks = [int(k) for k in (opts["walls"] or (1, 2, 3, 4))]
    for k in ks:
        if k not in (1, 2, 3, 4):
            raise ConfigError(f"no wall Delta_{k}")
    out = {"grid": [n, m],
           "walls": [wall_json(k, trace_wall(k, M=n, tol=tol, cache_dir=opts["cache_dir"], samples=m))
                     for k in ks]}
    _emit(out, opts["out"])


@main_group.command()
@click.option("--t", default=None, help="Parameter t, re,im.")
@click.option("--alpha", default="1,0", help="Scale alpha, re,im.")
@click.option("--out", default=None)
@_common
def bps(**kwargs):
    """Central charges and active classes of the BPS structure at t."""
    from .bps import bps_structure
    opts, config, tol = _prepare(kwargs)
    if opts.get("t") is None:
        raise ConfigError("give --t")
    b = bps_structure(parse_complex(opts["t"]), parse_complex(opts["alpha"]), tol)
    _emit(b.to_dict(), opts["out"])


@main_group.command("verify-wcf")
@click.option("--t1", default=None, help="Parameter on one side of the wall, re,im.")
@click.option("--t2", default=None, help="Parameter on the other side, re,im.")
@click.option("--sector", default=None, help="Sector lo,hi in radians.")
@click.option("--alpha", default="1,0", help="Scale alpha, re,im.")
@click.option("--out", default=None)
@_common
def verify_wcf_cmd(**kwargs):
    """Compare the sector products on both sides of a wall exactly."""
    from .bps import verify_wcf
    opts, config, tol = _prepare(kwargs)
    for k in ("t1", "t2", "sector"):
        if opts.get(k) is None:
            raise ConfigError(f"give --{k}")
    sector = opts["sector"]
    sector = tuple(sector) if isinstance(sector, (list, tuple)) else parse_pair(sector, "sector")
    rep = verify_wcf(parse_complex(opts["t1"]), parse_complex(opts["t2"]), sector,
                     parse_complex(opts["alpha"]), tol)
    _emit(rep, opts["out"])
    click.echo("PASS" if rep["equal"] else "FAIL", err=True)


def main(argv=None):
    try:
        main_group.main(args=argv, prog_name="cubicnet", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 2
    except click.Abort:
        return 2
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        return 2
    except CubicNetError as e:
        click.echo(f"engine error: {type(e).__name__}: {e}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
