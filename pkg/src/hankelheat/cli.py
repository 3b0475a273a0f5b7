"""Command-line front end.

Subcommands: hankel, heat, kernel, dist, check, wave.  Configuration is
an INI file; the flags --nu, --t, --out, --tol override it.  All numeric
output uses 17 significant digits so identical configurations produce
byte-identical files.  Exit codes: 0 success (for `check`/`wave`, all
checks passed), 2 configuration or domain error, 3 non-convergence.
"""

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HankelHeatError, NonConvergent
from .specfun import Order
from .quadrature import build_grid, build_plane_grid
from . import halfline as hl
from . import geometry as geo
from . import calculus as ca
from . import verify as vf


def _fmt(x):
    return "%.17g" % float(x)


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""
    command: str
    nu: float = 2.0
    t_values: tuple = (1.0,)
    target: str = "extension"
    x_max: float = 24.0
    n_x: int = 260
    u_max: float = 14.0
    n_u: int = 140
    layout: str = "composite"
    input_path: str | None = None
    out_path: str | None = None
    tol: float | None = None
    multiplier_terms: tuple = ()
    multiplier_file: str | None = None
    points: tuple = ()
    radius: float | None = None
    nu_list: tuple = (1.0, 1.5, 2.0, 3.0)
    t_list: tuple = (0.5, 1.0, 2.0)
    fast: bool = True
    kappa_scale: float = 1.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nu < 1.0:
            raise DomainError("nu must be >= 1")
        if self.n_x < 8 or self.n_u < 8:
            raise DomainError("node counts must be >= 8")


def _parse_floats(text):
    return tuple(float(s) for s in text.replace(",", " ").split())


def _parse_terms(text):
    terms = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        coef, t = part.split(":")
        terms.append((float(coef), float(t)))
    return tuple(terms)


def _parse_point(text):
    vals = _parse_floats(text)
    if len(vals) != 2:
        raise DomainError("a point is 'x,u' with two numbers")
    return geo.GPoint(vals[0], vals[1])


def load_config(command, path=None, overrides=None):
    """Build a RunConfig from an INI file plus flag overrides."""
    cp = configparser.ConfigParser()
    if path is not None:
        if not os.path.exists(path):
            raise DomainError("config file not found: %s" % path)
        cp.read(path)
    ov = overrides or {}

    def get(section, key, cast, default):
        if cp.has_option(section, key):
            return cast(cp.get(section, key))
        return default

    target = get("run", "target", str, "extension").strip()
    # mass integrals on the extension need a log-resolved far-reaching
    # x-grid; half-line profiles prefer the composite layout
    ext = target == "extension"
    cfg = RunConfig(
        command=command,
        nu=float(ov.get("nu") if ov.get("nu") is not None
                 else get("run", "nu", float, 2.0)),
        t_values=((float(ov["t"]),) if ov.get("t") is not None
                  else get("run", "t", _parse_floats, (1.0,))),
        target=target,
        x_max=get("grid", "x_max", float, 3000.0 if ext else 12.0),
        n_x=get("grid", "n_x", int, 500 if ext else 300),
        u_max=get("grid", "u_max", float, 14.0),
        n_u=get("grid", "n_u", int, 140),
        layout=get("grid", "layout", str,
                   "geometric" if ext else "composite").strip(),
        input_path=get("io", "input", str, None),
        out_path=(ov.get("out") if ov.get("out") is not None
                  else get("io", "out", str, None)),
        tol=(float(ov["tol"]) if ov.get("tol") is not None
             else get("run", "tol", float, None)),
        multiplier_terms=get("multiplier", "terms", _parse_terms, ()),
        multiplier_file=get("multiplier", "file", str, None),
        points=tuple(get("dist", k, _parse_point, None)
                     for k in ("p", "q") if cp.has_option("dist", k)),
        radius=get("dist", "radius", float, None),
        nu_list=get("suite", "nu_list", _parse_floats,
                    (1.0, 1.5, 2.0, 3.0)),
        t_list=get("suite", "t_list", _parse_floats, (0.5, 1.0, 2.0)),
        fast=get("suite", "fast", lambda s: s.strip().lower()
                 in ("1", "true", "yes"), True),
        kappa_scale=float(ov.get("kappa_fault") or 1.0),
    )
    if cfg.target not in ("halfline", "extension"):
        raise DomainError("target must be 'halfline' or 'extension'")
    return cfg


def _write_or_print(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_hankel(cfg: RunConfig) -> int:
    if not cfg.input_path:
        raise DomainError("hankel requires [io] input = <profile file>")
    if not os.path.exists(cfg.input_path):
        raise DomainError("input file not found: %s" % cfg.input_path)
    order = Order(cfg.nu)
    prof = hl.load_profile(cfg.input_path)
    out = hl.hankel_transform(order, prof)
    back = hl.hankel_inverse(order, out, out_grid=prof.grid)
    resid = (prof.grid.norm_l2(back.values - prof.values)
             / max(prof.grid.norm_l2(prof.values), 1e-300))
    if cfg.out_path:
        hl.save_profile(out, cfg.out_path)
    print("roundtrip_l2_error=" + _fmt(resid))
    tol = cfg.tol if cfg.tol is not None else 1e-5
    if resid > tol:
        raise NonConvergent("transform roundtrip error %g exceeds %g"
                            % (resid, tol))
    return 0


def cmd_heat(cfg: RunConfig) -> int:
    order = Order(cfg.nu)
    t = cfg.t_values[0]
    if cfg.target == "halfline":
        grid = build_grid(cfg.nu, cfg.x_max, cfg.n_x, layout=cfg.layout)
        kern = hl.bessel_heat_kernel(order, t, grid)
        mass = grid.integrate(kern.values)
        if cfg.out_path:
            hl.save_profile(kern, cfg.out_path)
    else:
        plane = build_plane_grid(cfg.nu, cfg.x_max, cfg.n_x,
                                 cfg.u_max, cfg.n_u, x_layout=cfg.layout)
        kern = ca.g_heat_kernel(order, t, plane)
        mass = plane.integrate(kern.values)
        if cfg.out_path:
            geo.save_field(kern, cfg.out_path)
    print("t=" + _fmt(t))
    print("mass=" + _fmt(mass))
    return 0


def _resolve_multiplier(cfg: RunConfig) -> ca.ExpMixMultiplier:
    if cfg.multiplier_terms:
        return ca.ExpMixMultiplier(terms=cfg.multiplier_terms)
    if cfg.multiplier_file:
        if not os.path.exists(cfg.multiplier_file):
            raise DomainError("multiplier file not found: %s"
                              % cfg.multiplier_file)
        data = np.loadtxt(cfg.multiplier_file, delimiter=",")
        mix = ca.project_to_expmix(data[:, 0], data[:, 1], n_terms=8,
                                   t_range=(ca.T_MIN, 8.0))
        print("projection_residual=" + _fmt(mix.residual))
        return mix
    raise DomainError("kernel requires [multiplier] terms or file")


def cmd_kernel(cfg: RunConfig) -> int:
    order = Order(cfg.nu)
    mix = _resolve_multiplier(cfg)
    if cfg.target == "halfline":
        grid = build_grid(cfg.nu, cfg.x_max, cfg.n_x, layout=cfg.layout)
        kern, l2_sq = hl.bessel_multiplier_kernel(
            order, lambda lam: mix(np.asarray(lam)), grid)
        print("l2_norm_predicted=" + _fmt(np.sqrt(max(l2_sq, 0.0))))
        if cfg.out_path:
            hl.save_profile(kern, cfg.out_path)
    else:
        plane = build_plane_grid(cfg.nu, cfg.x_max, cfg.n_x,
                                 cfg.u_max, cfg.n_u, x_layout=cfg.layout)
        kern, diag = ca.multiplier_kernel(order, mix, plane,
                                          via="transference")
        print("sup_norm=" + _fmt(np.max(np.abs(kern.values))))
        if cfg.out_path:
            geo.save_field(kern, cfg.out_path)
    return 0


def cmd_dist(cfg: RunConfig) -> int:
    order = Order(cfg.nu)
    lines = []
    if len(cfg.points) == 2:
        p, q = cfg.points
        lines.append("distance=" + _fmt(geo.distance(p, q)))
    for i, p in enumerate(cfg.points):
        lines.append("norm_%d=" % i + _fmt(geo.group_norm(p)))
        lines.append("modular_%d=" % i + _fmt(geo.modular(order, p)))
    if cfg.radius is not None:
        vol = geo.radial_integrate(
            order, lambda r: np.where(r <= cfg.radius, 1.0, 0.0),
            r_max=cfg.radius)
        lines.append("ball_volume=" + _fmt(vol))
    if not lines:
        raise DomainError("dist requires [dist] points and/or radius")
    _write_or_print("\n".join(lines), cfg.out_path)
    return 0


def cmd_check(cfg: RunConfig) -> int:
    suite_cfg = {"fast": cfg.fast, "kappa_scale": cfg.kappa_scale}
    reports = vf.run_suite(cfg.nu_list, cfg.t_list, suite_cfg)
    _write_or_print(vf.format_report(reports), cfg.out_path)
    return 0 if all(r.passed for r in reports) else 1


def cmd_wave(cfg: RunConfig) -> int:
    order = Order(cfg.nu)
    rep = vf.propagation_report(order, t_end=cfg.t_values[0])
    _write_or_print(vf.format_report([rep]), cfg.out_path)
    return 0 if rep.passed else 1


_COMMANDS = {
    "hankel": cmd_hankel,
    "heat": cmd_heat,
    "kernel": cmd_kernel,
    "dist": cmd_dist,
    "check": cmd_check,
    "wave": cmd_wave,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hankelheat",
        description="Transforms, heat kernels, geometry, and checks for "
                    "the Bessel hypergroup and its solvable extension.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--out", default=None, help="output file path")
    parser.add_argument("--nu", type=float, default=None)
    parser.add_argument("--t", type=float, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--inject-kappa-fault", type=float, default=None,
                        help=argparse.SUPPRESS)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    threads = os.environ.get("HANKELHEAT_THREADS")
    if threads is not None:
        try:
            int(threads)
        except ValueError:
            print("invalid HANKELHEAT_THREADS: %r" % threads,
                  file=sys.stderr)
            return 2
    try:
        cfg = load_config(args.command, args.config,
                          {"nu": args.nu, "t": args.t, "out": args.out,
                           "tol": args.tol,
                           "kappa_fault": args.inject_kappa_fault})
        return _COMMANDS[args.command](cfg)
    except NonConvergent as exc:
        print("non-convergent: %s" % exc, file=sys.stderr)
        return 3
    except (DomainError, configparser.Error, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except HankelHeatError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
