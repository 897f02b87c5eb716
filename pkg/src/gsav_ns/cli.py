"""Command line front end: ``gsav-ns {sweep,stability,run}``.

Options may also come from a flat ``key = value`` file given with
``--config``; flags on the command line win over file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import kernels
from .grid import GridSpec, l2_norm_velocity
from .harness import (SweepConfig, emit_report, emit_trace, run_case, run_sweep,
                      stability_probe, stability_setup)
from .mms import error_norms, get_example
from .stepper import RunAborted, initialize_exact, mms_config, run

log = logging.getLogger("gsav_ns")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

# option name -> (type, default) per subcommand
_COMMON = {
    "example": (str, "1"),
    "nu": (float, 1.0),
    "nx": (int, 250),
    "t_final": (float, 1.0),
    "k0": (float, 1.0),
    "lin_tol": (float, 1e-11),
}
_OPTIONS = {
    "sweep": {**_COMMON, "dts": (str, "10,20,40,80"), "out": (str, None),
              "format": (str, "csv"), "jobs": (int, 1)},
    "run": {**_COMMON, "dt": (float, 0.1), "trace": (str, None)},
    "stability": {**_COMMON, "example": (str, "2"), "nu": (float, 0.01), "nx": (int, 64),
                  "dt": (float, 0.25), "t_final": (float, 10.0),
                  "forcing_scale": (float, 1.0), "init_time": (float, 0.0),
                  "trace": (str, None)},
}


class ConfigError(ValueError):
    pass


def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsav-ns", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", choices=kernels.BACKENDS,
                        help="stencil kernel backend (default: GSAV_NS_BACKEND or numba)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep": "time-step convergence sweep against a manufactured solution",
        "run": "single simulation with optional monitor trace",
        "stability": "large-step energy-stability probe",
    }
    for name, opts in _OPTIONS.items():
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--backend", choices=kernels.BACKENDS, default=argparse.SUPPRESS,
                       help=argparse.SUPPRESS)
        for key, (typ, _default) in opts.items():
            flag = "--" + key.replace("_", "-")
            kw = {"type": typ, "default": None}
            if key == "format":
                kw["choices"] = ("csv", "text")
            if key == "dts":
                kw["help"] = "comma-separated k values for dt = 1/k"
            p.add_argument(flag, **kw)
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    opts = _OPTIONS[args.command]
    file_vals = read_config_file(args.config) if args.config else {}
    unknown = set(file_vals) - set(opts)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, (typ, default) in opts.items():
        cli_val = getattr(args, key)
        if cli_val is not None:
            out[key] = cli_val
        elif key in file_vals:
            try:
                out[key] = typ(file_vals[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {file_vals[key]!r}") from exc
        else:
            out[key] = default
    return out


def _parse_dts(text: str) -> list[float]:
    try:
        ks = [int(k) for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise ConfigError(f"--dts expects integers k (dt = 1/k), got {text!r}") from exc
    if not ks or min(ks) <= 0:
        raise ConfigError("--dts needs positive integers")
    return [1.0 / k for k in ks]


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_sweep(o: dict) -> int:
    cfg = SweepConfig(example=o["example"], nu=o["nu"], nx=o["nx"], dt_list=_parse_dts(o["dts"]),
                      t_final=o["t_final"], k0=o["k0"], lin_tol=o["lin_tol"], jobs=o["jobs"])
    report = run_sweep(cfg)
    _write(emit_report(report, o["format"]), o["out"])
    for row in report.rows:
        if row.failed:
            log.error("dt=%g failed: %s", row.dt, row.error)
    return EXIT_FAILED if report.any_failed else EXIT_OK


def cmd_run(o: dict) -> int:
    ex = get_example(o["example"])
    cfg = mms_config(ex, GridSpec(o["nx"], o["nx"]), o["nu"], o["dt"], o["t_final"],
                     k0=o["k0"], lin_tol=o["lin_tol"])
    try:
        state, records = run(cfg, initialize_exact(cfg, ex))
    except RunAborted as exc:
        log.error("%s", exc)
        if o["trace"]:
            _write(emit_trace(exc.records), o["trace"])
        return EXIT_FAILED
    if o["trace"]:
        _write(emit_trace(records), o["trace"])
    e = error_norms(state, ex, state.t)
    print(f"t={state.t:.6g} steps={len(records)} |e_u|={e.e_u:.6e} |grad e_u|={e.grad_e_u:.6e} "
          f"|e_p|={e.e_p:.6e} |grad e_p|={e.grad_e_p:.6e} xi={state.sav.xi:.6f}")
    return EXIT_OK


def cmd_stability(o: dict) -> int:
    cfg, init = stability_setup(o["example"], o["nu"], o["nx"], o["dt"], o["t_final"], o["k0"],
                                o["forcing_scale"], o["init_time"], o["lin_tol"])
    rep = stability_probe(cfg, init)
    if o["trace"]:
        _write(emit_trace(rep.records), o["trace"])
    s = rep.summary
    print(f"steps={rep.steps_completed}/{cfg.n_steps}")
    if s is not None:
        print(f"min_R={s.min_r:.6e} min_xi={s.min_xi:.6e} max_xi={s.max_xi:.6e} "
              f"max_|u|={s.max_u_norm:.6e}")
        print(f"R_strictly_decreasing={s.r_monotone} "
              f"R_decreases_iff_dissipative={s.r_tracks_dissipation} finite={s.all_finite}")
    if rep.hypothesis_violation:
        print(f"hypothesis violation: {rep.hypothesis_violation}")
    print("stable" if rep.stable else "UNSTABLE")
    return EXIT_OK if rep.stable else EXIT_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.backend:
        kernels.use_backend(args.backend)
    try:
        opts = resolve_options(args)
        handler = {"sweep": cmd_sweep, "run": cmd_run, "stability": cmd_stability}[args.command]
        return handler(opts)
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"gsav-ns: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
