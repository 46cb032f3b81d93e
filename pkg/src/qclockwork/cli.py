"""Command-line front end.

Subcommands: ptop, metrics, sweep, figure, sample, oracle-check.

Parameters come from a flat JSON file (``--config``) and are overridden by
flags.  Output goes to ``--out``; without it, to
``$QCLOCKWORK_OUT_DIR/<command>.<format>`` when that variable is set, and
to stdout otherwise.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 oracle-check failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .errors import ClockError, DegenerateGradientError, ParameterError, PrecisionWarning
from .model import (
    ClockParams,
    baseline_profile,
    effective_coupling,
    general_profile,
    horizontal_profile,
    two_qubit_profile,
)
from .oracle import build_oracle, dump_oracle
from .sampler import empirical_metrics, sample_ticks, write_sample_csv
from .sweep import (
    FIGURE_COLUMNS,
    METRICS,
    ORACLE_COLUMNS,
    SweepConfig,
    default_oracle_grid,
    format_number,
    parse_values,
    run_figure,
    run_oracle_check,
    run_sweep,
    sweep_columns,
    write_rows,
)
from .ticks import clock_metrics

OUT_DIR_ENV = "QCLOCKWORK_OUT_DIR"
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ORACLE = 0, 1, 2, 3

# flag dest -> ClockParams field
PARAM_KEYS = {
    "d": "d",
    "M": "M",
    "c": "c",
    "g": "g",
    "beta_c": "beta_C",
    "beta_h": "beta_H",
    "e_c": "E_C",
    "e_h": "E_H",
}
DEFAULT_D = 10


def _extended_float(text):
    if str(text).strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _machines(text):
    if str(text).strip().lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"M must be an integer or inf, got {text!r}")
    return int(value)


def _add_common(p):
    g = p.add_argument_group("clock parameters")
    g.add_argument("--d", type=int, help=f"ladder dimension (default {DEFAULT_D})")
    g.add_argument("--M", type=_machines, help="machines per transition: integer or inf (default inf)")
    g.add_argument("--c", type=float, help="decay rate of the top level, 1/s (default 25)")
    g.add_argument("--g", type=float, help="machine coupling (default 1)")
    g.add_argument("--beta-c", type=_extended_float, help="cold inverse temperature or inf (default inf)")
    g.add_argument("--beta-h", type=float, help="hot inverse temperature (default 0)")
    g.add_argument("--e-c", type=float, help="cold gap (default 1)")
    g.add_argument("--e-h", type=float, help="hot gap (default 2)")
    p.add_argument("--config", help="flat JSON file of option values; flags take precedence")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")


def build_parser():
    parser = argparse.ArgumentParser(prog="qclockwork", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ptop", help="evaluate the top-level probability on a time grid")
    _add_common(p)
    p.add_argument("--variant", choices=("general", "two_qubit", "horizontal", "baseline"))
    p.add_argument("--times", help="comma-separated times in seconds")
    p.add_argument("--t-max", type=float, help="grid end (default 2 pi / g)")
    p.add_argument("--points", type=int, help="grid size (default 201)")

    p = sub.add_parser("metrics", help="tick moments, accuracy, resolution, dissipation")
    _add_common(p)
    p.add_argument("--variant", choices=("clockwork", "baseline"))

    p = sub.add_parser("sweep", help="sweep one parameter")
    _add_common(p)
    p.add_argument("--axis", choices=("d", "M", "c", "g"))
    p.add_argument("--values", help="comma list or start:stop:step (stop inclusive)")
    p.add_argument("--outputs", help=f"comma list from {','.join(METRICS)}")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")

    p = sub.add_parser("figure", help="emit a figure's curve family as long-format data")
    _add_common(p)
    p.add_argument("--preset", help="fig4, fig5, fig6, fig8a, fig8b or fig9")
    p.add_argument("--d-max", type=int, help="truncate the preset's d grid")
    p.add_argument("--curve-M", help="comma list of M values (integers or inf) replacing the preset's")
    p.add_argument("--curve-c", help="comma list of decay rates replacing the preset's")
    p.add_argument("--curve-g", help="comma list of couplings replacing the preset's")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")

    p = sub.add_parser("sample", help="draw waiting times between ticks")
    _add_common(p)
    p.add_argument("--count", type=int, help="number of ticks (default 10000)")
    p.add_argument("--stream", type=int, help="substream index (default 0)")
    p.add_argument("--variant", choices=("clockwork", "baseline"))

    p = sub.add_parser("oracle-check", help="compare closed forms with exact evolution")
    _add_common(p)
    p.add_argument("--times-per-instance", type=int, help="time points per instance (default 100)")
    p.add_argument("--tol", type=float, help="pass threshold (default 1e-8)")
    p.add_argument(
        "--instances",
        help="semicolon list of d,M[,beta_c,beta_h]; default is the built-in grid",
    )
    p.add_argument("--dump", help="also write H_int of the --d/--M instance to this file")
    return parser


def _merged(args):
    """Flag values layered over the optional JSON config file."""
    opts = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ParameterError("config file must hold a flat JSON object")
        opts.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, value in vars(args).items():
        if value is not None and key != "config":
            opts[key] = value
    return opts


def _params(opts, **defaults):
    fields = {"d": DEFAULT_D}
    fields.update(defaults)
    for key, name in PARAM_KEYS.items():
        if key in opts:
            fields[name] = opts[key]
    return ClockParams(**fields)


@contextlib.contextmanager
def _output(opts, command):
    path = opts.get("out")
    if not path and os.environ.get(OUT_DIR_ENV):
        path = os.path.join(os.environ[OUT_DIR_ENV], f"{command}.{opts.get('format', 'csv')}")
    if not path:
        yield sys.stdout
        return
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise ParameterError(f"cannot write {path!r}: {exc}") from exc
    with fh:
        yield fh


def _meta(params=None, **extra):
    meta = {"tool": "qclockwork", "version": __version__}
    if params is not None:
        meta.update(params.as_dict())
    meta.update(extra)
    return meta


def cmd_ptop(opts):
    variant = opts.get("variant", "general")
    defaults = {"M": 1} if variant == "two_qubit" else {}
    if variant in ("two_qubit", "horizontal"):
        defaults["d"] = 2
    if variant == "horizontal":
        defaults.setdefault("M", 1)
    p = _params(opts, **defaults)
    builders = {
        "general": general_profile,
        "two_qubit": two_qubit_profile,
        "horizontal": horizontal_profile,
        "baseline": baseline_profile,
    }
    profile = builders[variant](p)
    if "times" in opts:
        times = np.array([float(x) for x in str(opts["times"]).split(",") if x.strip()])
    else:
        t_max = opts.get("t_max", 2 * math.pi / p.g)
        times = np.linspace(0.0, t_max, opts.get("points", 201))
    values = np.atleast_1d(profile.evaluate(times))
    rows = [{"t": t, "p_top": v} for t, v in zip(times, values)]
    with _output(opts, "ptop") as fh:
        write_rows(rows, ["t", "p_top"], fh, opts.get("format", "csv"), _meta(p, kind=profile.kind))
    return EXIT_OK


def cmd_metrics(opts):
    p = _params(opts)
    variant = opts.get("variant", "clockwork")
    m = clock_metrics(p, variant)
    row = {
        "t_bar": m.t_bar,
        "t2_bar": m.t2_bar,
        "delta_t": m.delta_t,
        "N": m.N,
        "R": m.R,
        "epsilon": m.epsilon,
        "C_M": effective_coupling(p) if variant == "clockwork" else math.nan,
    }
    with _output(opts, "metrics") as fh:
        write_rows([row], list(row), fh, opts.get("format", "csv"), _meta(p, variant=variant))
    return EXIT_OK


def cmd_sweep(opts):
    axis = opts.get("axis")
    if axis is None:
        raise ParameterError("sweep needs --axis")
    if "values" not in opts:
        raise ParameterError("sweep needs --values")
    outputs = opts.get("outputs", METRICS)
    if isinstance(outputs, str):
        outputs = tuple(o.strip() for o in outputs.split(",") if o.strip())
    config = SweepConfig(
        base=_params(opts),
        axis=axis,
        values=tuple(parse_values(axis, opts["values"])),
        outputs=tuple(outputs),
        format=opts.get("format", "csv"),
        out_path=opts.get("out"),
        workers=int(opts.get("workers", 1)),
    )
    rows = run_sweep(config)
    meta = _meta(config.base, axis=axis, seed=opts.get("seed", 0))
    with _output(opts, "sweep") as fh:
        write_rows(rows, sweep_columns(config), fh, config.format, meta)
    return EXIT_OK


def cmd_figure(opts):
    preset = opts.get("preset")
    if preset is None:
        raise ParameterError("figure needs --preset")
    family = {
        f"{axis}_values": parse_values(axis, opts[f"curve_{axis}"])
        for axis in ("M", "c", "g")
        if f"curve_{axis}" in opts
    }
    rows, meta = run_figure(
        preset, workers=int(opts.get("workers", 1)), d_max=opts.get("d_max"), family=family
    )
    meta = {**_meta(), **meta, "seed": opts.get("seed", 0)}
    with _output(opts, f"figure-{preset}") as fh:
        write_rows(rows, FIGURE_COLUMNS, fh, opts.get("format", "csv"), meta)
    return EXIT_OK


def cmd_sample(opts):
    p = _params(opts)
    seed = int(opts.get("seed", 0))
    sample = sample_ticks(
        p, int(opts.get("count", 10_000)), seed, stream=int(opts.get("stream", 0)),
        variant=opts.get("variant", "clockwork"),
    )
    fmt = opts.get("format", "csv")
    with _output(opts, "sample") as fh:
        if fmt == "csv":
            write_sample_csv(sample, fh)
        else:
            json.dump({"metadata": sample.metadata, "tick_times": sample.tick_times.tolist()}, fh)
            fh.write("\n")
    if sample.count >= 2:
        em = empirical_metrics(sample)
        print(
            f"t_bar_hat={format_number(em.t_bar_hat)} +- {em.t_bar_se:.3g}  "
            f"N_hat={format_number(em.N_hat)} +- {em.N_se:.3g}",
            file=sys.stderr,
        )
    return EXIT_OK


def _parse_instances(text, opts):
    grid = []
    base = _params(opts)
    for item in str(text).split(";"):
        parts = [s.strip() for s in item.split(",") if s.strip()]
        if not parts:
            continue
        if len(parts) not in (2, 4):
            raise ParameterError(f"instance must be d,M or d,M,beta_c,beta_h: {item!r}")
        fields = {"d": int(parts[0]), "M": _machines(parts[1])}
        if len(parts) == 4:
            fields["beta_C"] = _extended_float(parts[2])
            fields["beta_H"] = float(parts[3])
        grid.append(base.replace(**fields))
    return grid


def cmd_oracle_check(opts):
    if "instances" in opts:
        grid = _parse_instances(opts["instances"], opts)
    else:
        base = _params(opts)
        grid = default_oracle_grid(E_C=base.E_C, E_H=base.E_H, g=base.g)
    rows = run_oracle_check(
        grid, int(opts.get("times_per_instance", 100)), float(opts.get("tol", 1e-8))
    )
    if "dump" in opts:
        p = _params(opts, d=2, M=1)
        with open(opts["dump"], "w") as fh:
            dump_oracle(build_oracle(p), fh)
    with _output(opts, "oracle-check") as fh:
        write_rows(rows, ORACLE_COLUMNS, fh, opts.get("format", "csv"), _meta())
    failed = [r for r in rows if r["status"] == "fail"]
    for r in rows:
        print(f"d={r['d']} M={r['M']} beta_C={r['beta_C']} beta_H={r['beta_H']}: "
              f"{r['status']} max_err={r['max_err']:.3e} {r['message']}", file=sys.stderr)
    return EXIT_ORACLE if failed else EXIT_OK


COMMANDS = {
    "ptop": cmd_ptop,
    "metrics": cmd_metrics,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
    "sample": cmd_sample,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        opts = _merged(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always", PrecisionWarning)
            return COMMANDS[args.command](opts)
    except (ParameterError, DegenerateGradientError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ClockError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
