"""
Tests for the experiment runners and their reports.
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from briesz.exceptions import ConfigurationError, NyquistError
from briesz.experiments import (
    ExperimentRunner,
    default_gls_family,
    run_apply,
    run_batch,
    run_bounds,
    run_converge,
    run_experiment,
    run_gaussian_limit,
    run_gls,
    run_kernel_table,
    run_lowerbound,
    run_norms,
    run_uniform_converge,
    run_young,
)
from briesz.field import read_grid_function, sample, write_grid_function
from briesz.models import ExperimentConfig, Grid, TestFunctionSpec
from briesz.report import Report, render, render_csv, render_json, write_atomic, write_report


def test_young_trials():
    """Test randomized and Gaussian equality trials in one dimension."""
    report = run_young()
    summary = report.summary
    assert summary["trials"] == 200
    assert summary["all_hold"]
    assert summary["min_slack"] >= -1e-6
    assert summary["max_equality_gap"] <= 1e-3

    table = report.table
    assert list(table.columns) == ["trial", "case", "p", "q", "r", "lhs", "rhs", "slack", "holds"]
    fubini = table[table["case"] == "fubini"].iloc[0]
    assert fubini["lhs"] == pytest.approx(fubini["rhs"], rel=1e-6)
    assert len(table[table["case"] == "gaussian"]) == 3

    random = table[table["case"] == "random"]
    assert ((1 / random["p"] + 1 / random["q"] - 1 - 1 / random["r"]).abs() <= 1e-12).all()


def test_gaussian_limit():
    """Test B_R^(R^2/2) f0 -> f0 * f0 with decreasing error."""
    report = run_gaussian_limit()
    assert report.summary["strictly_decreasing"]
    assert report.summary["final_relative_error"] <= 0.01
    assert list(report.table["R"]) == [2.0, 4.0, 8.0]
    assert (report.table["symbol_gap"] <= 0.5).all()

    report = run_gaussian_limit(operator={"R": [50.0]}, grid={"dim": 1, "half_extent": 4.0, "points": 512})
    assert report.table["symbol_gap"].iloc[0] <= 1e-3


def test_converge():
    """Test Lp convergence of a smooth bump at the critical order."""
    report = run_converge()
    summary = report.summary
    assert summary["errors_nonincreasing_tail"]
    assert summary["relative_final_error"] <= 0.05
    assert summary["ratio_within_3"]
    assert list(report.table.columns) == ["R", "error", "ratio", "omega_term", "omega_truncated"]
    assert report.table["omega_truncated"].all()  # alpha = (n - 1)/2
    errors = report.table["error"].to_numpy()
    assert errors[-1] < errors[0]


def test_uniform_converge():
    """Test uniform convergence of a smooth bump."""
    report = run_uniform_converge()
    summary = report.summary
    assert math.isinf(summary["p"])
    assert summary["errors_nonincreasing_tail"]
    assert summary["relative_final_error"] <= 0.05
    assert summary["ratio_within_3"]
    assert "omega_term" not in report.table


def test_converge_band_limited_function():
    """Test that the ball multiplier leaves a band-limited function unchanged."""
    report = run_converge(
        grid={"dim": 1, "half_extent": 8.0, "points": 512},
        function={"kind": "gaussian"},
        operator={"alpha": 0.0, "R": [10.0, 20.0]},
        norms={"p": 2.0},
    )
    assert (report.table["error"] <= 1e-8).all()


def test_converge_rejects_bad_radii():
    """Test the R list guards."""
    with pytest.raises(ConfigurationError):
        run_converge(operator={"alpha": 0.5, "R": [4.0, 2.0]})
    with pytest.raises(NyquistError):
        run_gaussian_limit(operator={"R": [2.0, 200.0]})


def test_gls_transfer():
    """Test finite transfer ratios and their stability under refinement."""
    report = run_gls()
    summary = report.summary
    assert summary["finite"]
    assert summary["rejected_r"] == []
    assert 0 < summary["max_ratio"] < math.inf
    assert set(report.table["function"]) == {
        "gaussian(c2=0.5)",
        "gaussian(c2=2)",
        "smooth_bump(radius=2)",
        "smooth_bump(radius=3)",
        "cosine_packet(frequency=2,width=1)",
    }
    assert len(report.table) == 5 * 3

    refined = run_gls(grid={"dim": 2, "points": 512})
    assert refined.summary["max_ratio"] == pytest.approx(summary["max_ratio"], rel=0.2)


def test_gls_rejects_r_at_or_below_d():
    """Test that r <= d becomes a rejected row."""
    report = run_gls(
        grid={"dim": 2, "points": 64},
        norms={"r": [2.0, 4.0], "psi": {"kind": "iwaniec_sbordone", "a": 1.0, "b": 3.0}},
        functions=[{"kind": "smooth_bump", "radius": 2.0}],
    )
    assert report.summary["rejected_r"] == [2.0]
    assert len(report.rejected) == 1
    assert math.isnan(report.rejected["nu"].iloc[0])


def test_gls_single_point_reduces_to_lebesgue():
    """Test the degenerate generating function."""
    report = run_gls(
        grid={"dim": 2, "points": 64},
        norms={"r": [4.0], "psi": {"kind": "single_point", "point": 2.0}},
        functions=[{"kind": "gaussian"}],
    )
    row = report.table.iloc[0]
    assert row["bf_gnu"] == pytest.approx(row["bf_norm"] / row["nu"])


def test_default_gls_family():
    assert len(default_gls_family()) == 5


def test_kernel_table():
    """Test kernel rows against the origin value and Lq rejections."""
    report = run_kernel_table(kernel_table={"q": [0.9, 2.0], "r_points": 11})
    table = report.table
    assert list(table.columns) == ["row", "R", "r", "q", "value", "error", "panel_part", "tail_part", "reason"]
    evals = table[table["row"] == "eval"]
    assert len(evals) == 11
    assert evals["value"].iloc[0] == pytest.approx(report.summary["origin_value"])
    assert report.summary["q0"] == pytest.approx(1.0)

    assert len(report.rejected) == 1
    assert report.rejected["q"].iloc[0] == 0.9
    assert "q0" in report.rejected["reason"].iloc[0]
    accepted = table[(table["row"] == "lq_norm") & (table["reason"] == "")]
    assert accepted["value"].iloc[0] > 0


def test_bounds_table():
    """Test W coefficients, the reason columns and the measured estimates."""
    report = run_bounds()
    table = report.table
    summary = report.summary
    assert (summary["admissible"], summary["rejected"]) == (7, 2)
    assert set(map(tuple, report.rejected[["p", "r"]].to_numpy())) == {(2.0, 2.0), (3.0, 2.0)}
    assert report.rejected["reason"].str.contains("r <= p").all()
    admissible = table[table["reason"] == ""]
    assert (admissible["W"] > 0).all()
    assert (admissible["kernel_bound"] > 0).all()

    # every missing nu carries its reason
    assert (table.loc[table["nu"].isna(), "nu_reason"] != "").all()

    assert (admissible["lr_ratio"] > 0).all() and np.isfinite(admissible["lr_ratio"]).all()
    assert summary["max_lr_ratio"] == pytest.approx(admissible["lr_ratio"].max())
    assert (admissible["key_lhs"] > 0).all()
    assert (admissible["key_lhs"] <= admissible["key_rhs"] * (1 + 1e-6)).all()
    assert summary["key_estimate_holds"]
    assert report.rejected["lr_ratio"].isna().all()


def test_bounds_nu_defined_for_bounded_support():
    """Test that nu is filled where the generating function allows it."""
    report = run_bounds(
        grid={"dim": 2, "points": 64},
        norms={"psi": {"kind": "iwaniec_sbordone", "a": 1.0, "b": 3.0}},
        bounds={"p": [2.0], "r": [4.0, 8.0]},
    )
    table = report.table
    assert table["nu"].notna().any()
    filled = table[table["nu"].notna()]
    assert (filled["nu_reason"] == "").all()
    assert (table.loc[table["nu"].isna(), "nu_reason"] != "").all()


def test_lowerbound():
    """Test the lower-bound search summary."""
    report = run_lowerbound()
    assert report.summary["exceeds_theta"]
    assert report.summary["max_w"] >= report.summary["theta_reference"]
    assert report.summary["on_r_boundary"]
    assert len(report.table) == 1


def test_norms():
    """Test the norm table of the standard Gaussian."""
    report = run_norms()
    table = report.table
    assert list(table.columns) == ["p", "lp_norm", "psi", "ratio"]
    assert table["lp_norm"].iloc[0] == pytest.approx(1.0, abs=1e-6)
    assert report.summary["integral_re"] == pytest.approx(1.0, abs=1e-6)
    assert report.summary["gls_norm"] > 0


def test_apply(tmp_path):
    """Test operator application and the GridFunction output."""
    report = run_apply()
    assert report.summary["integral_out"] == pytest.approx(report.summary["integral_in"], rel=1e-9)
    assert report.output is not None
    assert report.table["method"].iloc[0] == "spectral"

    path = write_report(report, tmp_path / "out.json")
    loaded = read_grid_function(path)
    assert loaded.grid == report.output.grid


def test_apply_reads_input_file(tmp_path):
    """Test the GridFunction input path with the direct method."""
    grid = Grid(dim=1, half_extent=16.0, points=512)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=1.0), grid)
    path = tmp_path / "f.json"
    write_grid_function(f, path)

    config = ExperimentConfig.for_kind(
        "apply", input_path=str(path), operator={"alpha": 2.0, "R": [4.0], "method": "direct"}
    )
    runner = ExperimentRunner(config=config)
    report = runner.run()
    assert runner.grid == grid
    assert report.output.grid == grid
    assert report.summary["integral_out"] == pytest.approx(report.summary["integral_in"], abs=1e-3)


def test_reproducible_csv():
    """Test byte-identical CSV for the same seed."""
    config = ExperimentConfig.for_kind("young", seed=7, young={"trials": 20})
    first = render_csv(run_experiment(config))
    second = render_csv(run_experiment(config))
    assert first == second

    other = render_csv(run_experiment(config.model_copy(update={"seed": 8})))
    assert other != first


def test_render_formats():
    """Test the CSV header and trailer and the JSON document."""
    report = Report(
        kind="bounds",
        table=pd.DataFrame([{"p": 2.0, "r": 4.0, "W": math.nan, "reason": "r <= p"}]),
        summary={"admissible": 0},
        config={"kind": "bounds", "seed": 0},
    )
    text = render_csv(report)
    lines = text.splitlines()
    assert lines[0] == '# {"kind": "bounds", "seed": 0}'
    assert lines[1] == "p,r,W,reason"
    assert lines[2] == "2,4,nan,r <= p"
    assert lines[-1] == '# summary {"admissible": 0}'

    document = json.loads(render_json(report))
    assert document["columns"] == ["p", "r", "W", "reason"]
    assert document["rows"][0]["W"] is None
    assert document["summary"] == {"admissible": 0}
    assert render(report, "json") == render_json(report)
    with pytest.raises(ValueError):
        render(report, "xml")


def _reject_constant(token):
    raise ValueError(f"non-standard JSON token {token}")


def strict_loads(text):
    return json.loads(text, parse_constant=_reject_constant)


def test_reports_are_strict_json():
    """Test that infinities and NaN never reach the JSON output as bare tokens."""
    report = run_norms()
    assert math.isinf(report.config["norms"]["psi"]["b"])
    lines = render_csv(report).splitlines()
    config = strict_loads(lines[0][2:])
    assert config["norms"]["psi"]["b"] == "inf"
    strict_loads(lines[-1][len("# summary "):])

    document = strict_loads(render_json(report))
    assert document["config"]["norms"]["psi"]["b"] == "inf"
    assert document["rows"][-1]["p"] == "inf"

    report = Report(
        kind="norms",
        table=pd.DataFrame([{"p": -math.inf, "value": math.nan}]),
        summary={"p": math.inf, "gap": np.float64("nan")},
    )
    document = strict_loads(render_json(report))
    assert document["rows"] == [{"p": "-inf", "value": None}]
    assert document["summary"] == {"gap": None, "p": "inf"}


def test_write_atomic_and_stdout(tmp_path, capsys):
    """Test atomic writes and stdout output."""
    path = write_atomic("hello\n", tmp_path / "sub" / "a.txt")
    assert path.read_text() == "hello\n"
    assert [p.name for p in path.parent.iterdir()] == ["a.txt"]

    report = run_lowerbound(search={"alpha_points": 5, "R_points": 3})
    assert write_report(report) is None
    assert "max_w" in capsys.readouterr().out


def test_runner_from_config_file(tmp_path):
    """Test building a runner from a YAML file."""
    config = ExperimentConfig.for_kind("lowerbound", search={"alpha_points": 10, "R_points": 5})
    path = tmp_path / "config.yaml"
    config.to_yaml_file(path)
    runner = ExperimentRunner.from_config_file(path)
    assert runner.config == config
    assert runner.run().kind == "lowerbound"


def test_run_batch(tmp_path):
    """Test parallel runs keep input order and write outputs."""
    configs = [
        ExperimentConfig.for_kind("lowerbound", search={"alpha_points": 10, "R_points": 5}),
        ExperimentConfig.for_kind("young", young={"trials": 5}, output={"path": str(tmp_path / "young.csv")}),
        ExperimentConfig.for_kind("bounds", output={"path": str(tmp_path / "bounds.json"), "format": "json"}),
    ]
    reports = run_batch(configs)
    assert [r.kind for r in reports] == ["lowerbound", "young", "bounds"]
    assert (tmp_path / "young.csv").read_text() == render_csv(reports[1])
    assert json.loads((tmp_path / "bounds.json").read_text())["kind"] == "bounds"


if __name__ == "__main__":
    pytest.main([__file__])
