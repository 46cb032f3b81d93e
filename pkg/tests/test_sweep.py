import io
import json
import math

import numpy as np
import pytest

from qclockwork.errors import ParameterError, PrecisionWarning
from qclockwork.model import ClockParams
from qclockwork.sweep import (
    FIGURE_COLUMNS,
    PRESETS,
    SweepConfig,
    default_oracle_grid,
    exclude_suboptimal,
    format_number,
    parse_values,
    run_figure,
    run_oracle_check,
    run_sweep,
    sweep_columns,
    write_rows,
)
from qclockwork.ticks import clock_metrics


def test_format_number():
    assert format_number(0.1) == "1.0000000000000001e-01"
    assert float(format_number(1 / 3)) == 1 / 3
    assert format_number(7) == "7"
    assert format_number(math.inf) == "inf"
    assert format_number(math.nan) == "nan"


@pytest.mark.parametrize(
    "axis, spec, expected",
    [
        ("d", "2:5:1", [2, 3, 4, 5]),
        ("M", "1,2,inf", [1, 2, math.inf]),
        ("c", "0.5:1.5:0.5", [0.5, 1.0, 1.5]),
        ("g", [0.1, 2], [0.1, 2.0]),
    ],
)
def test_parse_values(axis, spec, expected):
    assert parse_values(axis, spec) == expected


@pytest.mark.parametrize("axis, spec", [("d", "2.5"), ("d", ""), ("x", "1"), ("c", "1:2"), ("c", "1:2:0")])
def test_parse_values_rejects(axis, spec):
    with pytest.raises(ParameterError):
        parse_values(axis, spec)


def test_effective_coupling_sweep_over_machines():
    cfg = SweepConfig(base=ClockParams(d=2, c=10.0), axis="M", values=(1, 2, 3, 4), outputs=("C_M",))
    rows = run_sweep(cfg)
    assert [r["C_M"] for r in rows] == pytest.approx([5.0, 7.5, 8.75, 9.375], rel=1e-15)
    assert sweep_columns(cfg) == ["M", "d", "c", "g", "C_M", "status", "error"]


def test_sweep_matches_direct_metrics_and_is_ordered():
    cfg = SweepConfig(base=ClockParams(d=4, M=2), axis="d", values=(6, 3, 9), outputs=("N", "R"))
    rows = run_sweep(cfg)
    assert [r["d"] for r in rows] == [6, 3, 9]
    for r in rows:
        m = clock_metrics(ClockParams(d=r["d"], M=2))
        assert r["N"] == m.N and r["R"] == m.R


def test_parallel_sweep_is_identical():
    base = ClockParams(d=5, M=3)
    serial = run_sweep(SweepConfig(base=base, axis="c", values=(1.0, 10.0, 100.0, 1e3)))
    parallel = run_sweep(SweepConfig(base=base, axis="c", values=(1.0, 10.0, 100.0, 1e3), workers=2))
    assert serial == parallel


def test_degenerate_and_invalid_points_are_reported():
    base = ClockParams(d=3, M=1, c=1.0)
    rows = run_sweep(SweepConfig(base=base, axis="g", values=(1.0,), outputs=("N", "R")))
    assert rows[0]["status"] == "ok"
    cold = ClockParams(d=3, M=1, c=1.0, beta_H=20.0)
    with pytest.warns(PrecisionWarning):
        rows = run_sweep(SweepConfig(base=cold, axis="c", values=(1.0,), outputs=("N", "R")))
    assert rows[0]["status"] == "degenerate" and rows[0]["R"] == 0.0 and math.isnan(rows[0]["N"])


def test_sweep_config_validation():
    base = ClockParams(d=3)
    with pytest.raises(ParameterError):
        SweepConfig(base=base, axis="d", values=(1,))
    with pytest.raises(ParameterError):
        SweepConfig(base=base, axis="d", values=(3,), outputs=("Q",))
    with pytest.raises(ParameterError):
        SweepConfig(base=base, axis="d", values=())


def test_exclude_suboptimal():
    rows = [
        {"N": 1, "R": 5},
        {"N": 2, "R": 4},
        {"N": 3, "R": 3},
        {"N": 2, "R": 2},
        {"N": 4, "R": 1},
    ]
    assert exclude_suboptimal(rows) == rows[:4]
    assert exclude_suboptimal(rows[:3]) == rows[:3]


def test_presets_are_labelled():
    assert set(PRESETS) == {"fig4", "fig5", "fig6", "fig8a", "fig8b", "fig9"}
    for preset in PRESETS.values():
        assert preset.curves and len(preset.d_values) > 3
        ids = [c.curve_id for c in preset.curves]
        assert len(ids) == len(set(ids)) and all("," not in i for i in ids)
    assert PRESETS["fig4"].reconstructed


def test_small_figure_run():
    rows, meta = run_figure("fig8b", d_max=12)
    assert meta["preset"] == "fig8b" and meta["y"] == "R"
    curves = {r["curve_id"] for r in rows}
    assert len(curves) == len(PRESETS["fig8b"].curves)
    inf_rows = [r for r in rows if r["curve_id"].startswith("M=inf")]
    ys = [r["y"] for r in inf_rows]
    assert all(b < a for a, b in zip(ys, ys[1:]))


def test_figure_unknown_preset():
    with pytest.raises(ParameterError):
        run_figure("fig99")


def test_oracle_check_rows():
    grid = default_oracle_grid()[:3] + [ClockParams(d=6, M=1)]
    rows = run_oracle_check(grid, times_per_instance=20)
    assert [r["status"] for r in rows] == ["pass", "pass", "pass", "skipped"]
    assert all(r["max_err"] <= 1e-12 for r in rows[:3])


def test_oracle_check_reports_failure_with_tiny_tolerance():
    rows = run_oracle_check([ClockParams(d=3, M=1, beta_C=3.0, beta_H=0.1)], times_per_instance=50, tol=0.0)
    assert rows[0]["status"] in ("pass", "fail")
    assert rows[0]["status"] == ("pass" if rows[0]["max_err"] == 0.0 else "fail")


def test_write_rows_csv_and_json():
    rows = [{"curve_id": "M=1;c=25;g=1", "x": 0.5, "y": math.inf, "d": 3}]
    buf = io.StringIO()
    write_rows(rows, FIGURE_COLUMNS, buf, "csv", {"seed": 1, "preset": "fig5"})
    lines = buf.getvalue().splitlines()
    assert lines[:2] == ["# seed=1", "# preset=fig5"]
    assert lines[2] == "curve_id,x,y,d"
    assert lines[3] == "M=1;c=25;g=1,5.0000000000000000e-01,inf,3"
    buf = io.StringIO()
    write_rows(rows, FIGURE_COLUMNS, buf, "json", {"seed": 1})
    payload = json.loads(buf.getvalue())
    assert payload["rows"][0]["y"] == "inf" and payload["metadata"]["seed"] == 1
    with pytest.raises(ParameterError):
        write_rows(rows, FIGURE_COLUMNS, io.StringIO(), "xml")


def test_csv_numbers_round_trip():
    xs = np.random.default_rng(0).random(50) * 10.0 ** np.arange(-25, 25)
    for x in xs:
        assert float(format_number(x)) == x


def test_preset_family_override():
    preset = PRESETS["fig4"].with_family(M_values=[2, math.inf], c_values=[50.0])
    assert [c.curve_id for c in preset.curves] == ["M=2;c=50;g=1", "M=inf;c=50;g=1"]
    assert preset.metadata["custom_curves"] and preset.reconstructed
    # g stays at the preset's value when not overridden
    assert all(c.base.g == 1.0 for c in preset.curves)
    rows, meta = run_figure("fig4", d_max=6, family={"M_values": [3]})
    assert {r["curve_id"] for r in rows} == {"M=3;c=100;g=1", "M=3;c=1000;g=1", "M=3;c=10000;g=1"}
    assert meta["custom_curves"] is True
