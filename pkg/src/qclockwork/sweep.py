"""Parameter sweeps, figure curve families and oracle-check suites.

Everything here returns plain row dictionaries so the CLI (or a notebook)
can write them as CSV or JSON.  Points are independent: a failure at one
axis value becomes an error row rather than aborting the sweep.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .errors import ClockError, DegenerateProfileError, OracleSizeError, ParameterError
from .model import (
    ClockParams,
    effective_coupling,
    p_top_general,
    p_top_horizontal_finite_T,
    p_top_two_qubit,
)
from .oracle import build_oracle, evolve_p_top, oracle_dim
from .ticks import clock_metrics

__all__ = [
    "METRICS",
    "SweepConfig",
    "CurveSpec",
    "FigurePreset",
    "PRESETS",
    "parse_values",
    "run_sweep",
    "run_figure",
    "exclude_suboptimal",
    "default_oracle_grid",
    "run_oracle_check",
    "format_number",
    "write_rows",
]

METRICS = ("N", "R", "epsilon", "t_bar", "delta_t", "C_M")
AXES = ("d", "M", "c", "g")


def format_number(x):
    """17 significant digits in scientific notation; ints and text pass through."""
    if isinstance(x, (bool, str)) or x is None:
        return "" if x is None else str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _axis_value(axis, token):
    token = str(token).strip()
    if axis == "M" and token.lower() in ("inf", "infinity"):
        return math.inf
    if axis in ("d", "M"):
        v = float(token)
        if not v.is_integer():
            raise ParameterError(f"{axis} values must be integers, got {token!r}")
        return int(v)
    return float(token)


def parse_values(axis, spec):
    """Parse ``"2,3,5"`` or ``"start:stop:step"`` (stop inclusive) into a list."""
    if axis not in AXES:
        raise ParameterError(f"axis must be one of {AXES}, got {axis!r}")
    if isinstance(spec, (list, tuple)):
        values = [_axis_value(axis, v) for v in spec]
    else:
        spec = str(spec).strip()
        if not spec:
            values = []
        elif ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ParameterError(f"range must be start:stop:step, got {spec!r}")
            start, stop, step = (float(p) for p in parts)
            if step <= 0:
                raise ParameterError("range step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [_axis_value(axis, repr(start + i * step)) for i in range(max(n, 0))]
        else:
            values = [_axis_value(axis, v) for v in spec.split(",") if v.strip()]
    if not values:
        raise ParameterError("sweep values must be non-empty")
    return values


@dataclass(frozen=True)
class SweepConfig:
    """One-axis sweep around a base parameter set."""

    base: ClockParams
    axis: str
    values: tuple
    outputs: tuple = METRICS
    format: str = "csv"
    out_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ParameterError("sweep values must be non-empty")
        object.__setattr__(self, "values", tuple(parse_values(self.axis, list(self.values))))
        bad = [o for o in self.outputs if o not in METRICS]
        if bad:
            raise ParameterError(f"unknown outputs {bad}; choose from {METRICS}")
        if self.format not in ("csv", "json"):
            raise ParameterError(f"format must be csv or json, got {self.format!r}")
        for v in self.values:
            self.base.replace(**{self.axis: v})


def _point(params, outputs):
    row = {"status": "ok", "error": ""}
    try:
        if "C_M" in outputs:
            row["C_M"] = effective_coupling(params)
        needs_moments = any(o != "C_M" for o in outputs)
        if needs_moments:
            m = clock_metrics(params)
            values = {"N": m.N, "R": m.R, "epsilon": m.epsilon, "t_bar": m.t_bar, "delta_t": m.delta_t}
            row.update({k: v for k, v in values.items() if k in outputs})
    except DegenerateProfileError as exc:
        row.update(status="degenerate", error=str(exc))
        degenerate = {"N": math.nan, "R": 0.0, "epsilon": 0.0, "t_bar": math.inf, "delta_t": math.inf}
        row.update({k: v for k, v in degenerate.items() if k in outputs})
    except (ClockError, ArithmeticError, ValueError) as exc:
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        row.update({k: math.nan for k in outputs if k not in row})
    return row


def _sweep_task(args):
    params, outputs = args
    return _point(params, outputs)


def _map(tasks, workers):
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_task, tasks))
    return [_sweep_task(t) for t in tasks]


def run_sweep(config: SweepConfig):
    """Evaluate every axis value; rows come back in axis order."""
    params = [config.base.replace(**{config.axis: v}) for v in config.values]
    results = _map([(p, tuple(config.outputs)) for p in params], config.workers)
    rows = []
    for v, p, res in zip(config.values, params, results):
        row = {config.axis: v, "d": p.d, "M": p.M, "c": p.c, "g": p.g}
        row.update({k: res.get(k, math.nan) for k in config.outputs})
        row.update(status=res["status"], error=res["error"])
        rows.append(row)
    return rows


def sweep_columns(config: SweepConfig):
    lead = [config.axis] + [k for k in ("d", "M", "c", "g") if k != config.axis]
    return lead + list(config.outputs) + ["status", "error"]


# Figures


@dataclass(frozen=True)
class CurveSpec:
    curve_id: str
    base: ClockParams
    x: str  # "d" or a metric name
    y: str


@dataclass(frozen=True)
class FigurePreset:
    """A family of curves, each varying d at fixed (M, c, g)."""

    name: str
    curves: tuple
    d_values: tuple
    note: str = ""
    reconstructed: bool = True
    postprocess: str | None = None
    metadata: dict = field(default_factory=dict)

    def with_d_max(self, d_max):
        ds = tuple(d for d in self.d_values if d <= d_max)
        return replace(self, d_values=ds)

    def with_family(self, M_values=None, c_values=None, g_values=None):
        """Rebuild the curves as every combination of the given (M, c, g).

        Axes left as ``None`` keep the values already used by the preset.
        """
        if M_values is None and c_values is None and g_values is None:
            return self

        def keep(values, attr):
            if values is not None:
                return list(values)
            return list(dict.fromkeys(getattr(cv.base, attr) for cv in self.curves))

        x, y = self.curves[0].x, self.curves[0].y
        bases = [
            self.curves[0].base.replace(M=M, c=c, g=g)
            for c in keep(c_values, "c")
            for g in keep(g_values, "g")
            for M in keep(M_values, "M")
        ]
        meta = {**self.metadata, "custom_curves": True}
        return replace(self, curves=_curves(bases, x, y), reconstructed=True, metadata=meta)


def d_grid(d_max, dense_to=40, points=60):
    """All integers up to ``dense_to`` then a geometric grid up to ``d_max``."""
    dense = list(range(2, min(dense_to, d_max) + 1))
    if d_max <= dense_to:
        return tuple(dense)
    geo = np.unique(np.round(np.geomspace(dense_to, d_max, points)).astype(int))
    return tuple(sorted(set(dense) | set(int(d) for d in geo)))


def _label(M):
    return "inf" if M == math.inf else str(int(M))


def _curves(pairs, x, y):
    return tuple(
        CurveSpec(f"M={_label(p.M)};c={p.c:g};g={p.g:g}", p, x, y) for p in pairs
    )


INF = math.inf


def _presets():
    P = lambda M, c, g=1.0: ClockParams(d=2, M=M, c=c, g=g)  # noqa: E731
    return {
        "fig4": FigurePreset(
            "fig4",
            _curves([P(M, c) for c in (1e2, 1e3, 1e4) for M in (1, 5, INF)], "d", "N"),
            d_grid(3_000_000, points=80),
            note="N vs d; (M, c) legend values are reconstruction choices",
        ),
        "fig5": FigurePreset(
            "fig5",
            _curves([P(M, 25.0) for M in (1, 2, 5, 10, INF)] + [P(INF, c) for c in (1e2, 1e3)], "R", "N"),
            d_grid(100_000),
            note="(R, N) as d varies; c = 25 /s, g = 1 E_C; extra M=inf curves at larger c",
            reconstructed=False,
        ),
        "fig6": FigurePreset(
            "fig6",
            _curves([P(M, 1e5) for M in (1, 2, 5, 10, INF)], "epsilon", "N"),
            d_grid(100_000),
            note="(epsilon, N) as d varies at c = 1e5 /s; sub-optimal points dropped",
            postprocess="exclude_suboptimal",
            reconstructed=False,
        ),
        "fig8a": FigurePreset(
            "fig8a",
            _curves([P(INF, 10.0, g) for g in (0.1, 0.5, 1.0, 2.0)], "d", "N"),
            d_grid(20_000),
            note="N vs d at c = 10 /s for several g; g values are reconstruction choices",
        ),
        "fig8b": FigurePreset(
            "fig8b",
            _curves([P(M, 1e3) for M in (1, 2, 5, 10, INF)], "d", "R"),
            d_grid(1_000),
            note="R vs d at g = 1 E_C, c = 1e3 /s; M values are reconstruction choices",
        ),
        "fig9": FigurePreset(
            "fig9",
            _curves([P(INF, 25.0, g) for g in (0.5, 1.0, 2.0, 5.0)], "R", "N"),
            d_grid(20_000),
            note="(R, N) as d varies at M = inf, c = 25 /s; g values are reconstruction choices",
        ),
    }


PRESETS = _presets()


def exclude_suboptimal(rows):
    """Drop trailing points after the first d at which both N and R fell."""
    out = []
    prev = None
    for row in rows:
        out.append(row)
        if prev is not None and row["N"] < prev["N"] and row["R"] < prev["R"]:
            break
        prev = row
    return out


def run_figure(preset, workers=1, d_max=None, family=None):
    """Long-format rows ``(curve_id, d, x, y)`` for every curve in a preset.

    Points where the clock degenerates (essentially never ticks) are kept
    only when the y-axis is R, where the limiting value is 0.

    Parameters
    ----------
    preset : str or FigurePreset
    workers : int, optional
        Worker processes for the point evaluations.
    d_max : int, optional
        Drop grid points above this ladder size.
    family : dict, optional
        ``M_values``, ``c_values`` and/or ``g_values`` overriding the
        preset's curve family, see :meth:`FigurePreset.with_family`.
    """
    if isinstance(preset, str):
        if preset not in PRESETS:
            raise ParameterError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        preset = PRESETS[preset]
    if d_max is not None:
        preset = preset.with_d_max(d_max)
    if family:
        preset = preset.with_family(**family)
    outputs = ("N", "R", "epsilon", "t_bar", "delta_t")
    tasks = [(curve.base.replace(d=d), outputs) for curve in preset.curves for d in preset.d_values]
    results = iter(_map(tasks, workers))
    rows, skipped = [], 0
    for curve in preset.curves:
        curve_rows = []
        for d in preset.d_values:
            res = next(results)
            if res["status"] == "error" or (res["status"] == "degenerate" and curve.y != "R"):
                skipped += 1
                continue
            res = dict(res, d=d)
            curve_rows.append(res)
        if preset.postprocess == "exclude_suboptimal":
            kept = exclude_suboptimal(curve_rows)
            skipped += len(curve_rows) - len(kept)
            curve_rows = kept
        for res in curve_rows:
            x = res["d"] if curve.x == "d" else res[curve.x]
            rows.append({"curve_id": curve.curve_id, "x": x, "y": res[curve.y], "d": res["d"]})
    meta = {
        "preset": preset.name,
        "note": preset.note,
        "reconstructed": preset.reconstructed,
        "x": preset.curves[0].x,
        "y": preset.curves[0].y,
        "skipped_points": skipped,
        "curves": " | ".join(c.curve_id for c in preset.curves),
        **preset.metadata,
        "version": __version__,
    }
    return rows, meta


FIGURE_COLUMNS = ["curve_id", "x", "y", "d"]


# Oracle checks


def default_oracle_grid(E_C=1.0, E_H=2.0, g=1.0):
    grid = []
    for betas in ((math.inf, 0.0), (3.0 / E_C, 0.2 / E_H)):
        for d, M in ((2, 1), (2, 2), (3, 1), (3, 2), (4, 1)):
            grid.append(ClockParams(d=d, M=M, g=g, beta_C=betas[0], beta_H=betas[1], E_C=E_C, E_H=E_H))
    return grid


def _analytic_variants(p):
    fns = [p_top_general]
    if p.d == 2 and p.M != math.inf:
        fns.append(p_top_horizontal_finite_T)
        if p.M == 1:
            fns.append(p_top_two_qubit)
    return fns


def run_oracle_check(grid, times_per_instance=100, tol=1e-8):
    """Compare every applicable closed form against exact evolution."""
    rows = []
    for p in grid:
        row = {
            "d": p.d,
            "M": p.M,
            "beta_C": p.beta_C,
            "beta_H": p.beta_H,
            "dim": oracle_dim(p.d, p.M) if p.M != math.inf else math.inf,
            "max_err": math.nan,
            "status": "pass",
            "message": "",
        }
        try:
            system = build_oracle(p)
            times = np.linspace(0.0, 2 * math.pi / p.g, times_per_instance)
            exact = evolve_p_top(system, times).p_top
            err = max(float(np.max(np.abs(fn(p, times) - exact))) for fn in _analytic_variants(p))
            row["max_err"] = err
            if not err <= tol:
                row["status"] = "fail"
        except OracleSizeError as exc:
            row.update(status="skipped", message=str(exc))
        except (ClockError, ArithmeticError, ValueError) as exc:
            row.update(status="fail", message=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


ORACLE_COLUMNS = ["d", "M", "beta_C", "beta_H", "dim", "max_err", "status", "message"]


# Output


def _csv_cell(v):
    text = format_number(v)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def write_rows(rows, columns, fh, fmt="csv", metadata=None):
    """Write rows as CSV (with ``# key=value`` header lines) or JSON."""
    metadata = metadata or {}
    if fmt == "json":
        def clean(v):
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                return format_number(v)
            if isinstance(v, np.integer):
                return int(v)
            if isinstance(v, np.floating):
                return float(v)
            return v

        payload = {
            "metadata": {k: clean(v) for k, v in metadata.items()},
            "rows": [{c: clean(r.get(c)) for c in columns} for r in rows],
        }
        json.dump(payload, fh, indent=1)
        fh.write("\n")
        return
    if fmt != "csv":
        raise ParameterError(f"format must be csv or json, got {fmt!r}")
    for key, value in metadata.items():
        fh.write(f"# {key}={format_number(value) if not isinstance(value, str) else value}\n")
    fh.write(",".join(columns) + "\n")
    for r in rows:
        fh.write(",".join(_csv_cell(r.get(c, "")) for c in columns) + "\n")
