import json
import math

import numpy as np
import pytest

from src.errors import ConfigError, FitError, GeometryError, SweepRowError
from src.experiments import (
    GeneratedPair,
    PairEvaluator,
    SweepConfig,
    SweepReport,
    SweepRow,
    evaluate_gates,
    fit_loglog,
    generate_pair,
    polygon_sides_for,
    regular_polygon,
    run_sweep,
    split_halves,
)
from src.geometry import Ball, Parallel, hausdorff_distance
from src.main import main
from src.measures import DiscreteMeasure
from src.outputs import ReportWriter, read_report_csv

DELTAS = (0.2, 0.1, 0.05, 0.02, 0.01)


def sweep_config(**overrides) -> SweepConfig:
    data = {
        "name": "unit_test",
        "scenario": "translate",
        "base": "config/bodies/unit_square.json",
        "deltas": list(DELTAS),
        "indices": [0],
        "forms": ["perimeter2d"],
        "samples": 10_000,
        "oracle": False,
    }
    data.update(overrides)
    return SweepConfig.from_dict(data)


# ---- 场景 ----

def test_translate_is_exact(unit_square):
    pair = generate_pair("translate", unit_square, 0.05)
    assert pair.d_h == 0.05 and pair.error_bound == 0.0
    assert pair.L == unit_square.translated([0.05, 0.0])


@pytest.mark.parametrize("scenario", ["rotate", "vertex-perturb"])
def test_bisected_scenarios_hit_target(unit_square, scenario):
    pair = generate_pair(scenario, unit_square, 0.05, seed=3)
    assert pair.d_h == pytest.approx(0.05, rel=1e-2)
    measured = hausdorff_distance(pair.K, pair.L, tol=1e-6)
    assert measured.value == pytest.approx(pair.d_h, abs=pair.error_bound + measured.error_bound + 1e-9)


def test_rotate_is_deterministic(unit_square):
    a = generate_pair("rotate", unit_square, 0.02, seed=0)
    b = generate_pair("rotate", unit_square, 0.02, seed=0)
    assert a.parameter == b.parameter and a.L == b.L


def test_ball_vs_polygon(unit_disk):
    pair = generate_pair("ball-vs-polygon", unit_disk, 0.01)
    assert pair.parameter == 23
    assert pair.d_h == pytest.approx(1 - math.cos(math.pi / 23), abs=pair.error_bound + 1e-5)


def test_polygon_sides():
    assert polygon_sides_for(0.01) == 23
    assert polygon_sides_for(0.6) == 3
    hexagon = regular_polygon(np.zeros(2), 1.0, 6)
    assert len(hexagon.vertices) == 6


@pytest.mark.parametrize("scenario, body", [
    ("spin", Ball([0, 0], 1.0)),
    ("vertex-perturb", Ball([0, 0], 1.0)),
    ("ball-vs-polygon", Parallel(Ball([0, 0], 1.0), 0.1)),
    ("ball-vs-polygon", Ball([0, 0, 0], 1.0)),
])
def test_scenario_errors(scenario, body):
    with pytest.raises(ConfigError):
        generate_pair(scenario, body, 0.05)


def test_nonpositive_delta(unit_square):
    with pytest.raises(GeometryError):
        generate_pair("translate", unit_square, 0.0)


@pytest.mark.slow
def test_rotate_cube(unit_cube):
    pair = generate_pair("rotate", unit_cube, 0.05, seed=1)
    assert 0.025 <= pair.d_h <= 0.1


# ---- 拟合 ----

def test_fit_exact_power_laws():
    d = np.array([0.2, 0.1, 0.05, 0.02, 0.01])
    assert fit_loglog(d, d).slope == pytest.approx(1.0, abs=1e-12)
    fit = fit_loglog(d, 3 * np.sqrt(d))
    assert fit.slope == pytest.approx(0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-12)
    slope, intercept, residual = fit
    assert residual <= 1e-12


def test_fit_with_noise():
    rng = np.random.default_rng(0)
    d = np.geomspace(1e-3, 1e-1, 20)
    y = np.sqrt(d) * np.exp(rng.normal(0.0, 0.01, size=d.size))
    assert fit_loglog(d, y).slope == pytest.approx(0.5, abs=0.02)


def test_fit_excludes_nonpositive_rows():
    d = [0.2, 0.1, 0.05, 0.02]
    fit = fit_loglog(d, [0.2, 0.0, 0.05, 0.02])
    assert fit.excluded == [1]
    assert fit.slope == pytest.approx(1.0)


def test_fit_needs_three_rows():
    with pytest.raises(FitError):
        fit_loglog([0.1, 0.01, 0.001], [1.0, -1.0, 0.5])


# ---- 扫描配置 ----

def test_config_file_loads():
    cfg = SweepConfig.load("config/sweeps/translate_square.json")
    assert cfg.name == "translate_square"
    assert cfg.deltas == DELTAS
    assert SweepConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("name", ["translate_square", "rotate_square", "ball_vs_polygon"])
def test_shipped_sweeps_cover_acceptance_grid(name):
    cfg = SweepConfig.load(f"config/sweeps/{name}.json")
    lower, _ = split_halves(cfg.deltas)
    assert len(lower) >= 3
    assert {"perimeter2d", "turning2d"} <= set(cfg.forms)
    if cfg.scenario != "ball-vs-polygon":
        assert sum(form.startswith("poly:") for form in cfg.forms) >= 5


@pytest.mark.parametrize("change", [
    {"samples": 5000},
    {"deltas": [0.1, 0.2]},
    {"deltas": [0.1, -0.01]},
    {"scenario": "spin"},
    {"colour": "red"},
    {"indices": []},
    {"seed": -1},
    {"coarsen_h": 0.0},
])
def test_config_validation(change):
    with pytest.raises(ConfigError):
        sweep_config(**change)


def test_config_missing_field():
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"name": "x", "scenario": "translate", "base": "b.json"})


def test_config_overrides():
    cfg = sweep_config()
    changed = cfg.with_overrides(samples=20_000, seed=None, output="elsewhere")
    assert changed.samples == 20_000
    assert changed.seed == cfg.seed
    assert changed.output == "elsewhere"


def test_split_halves():
    assert split_halves(list(DELTAS)) == ([4, 3, 2], [1, 0])
    assert split_halves([0.1]) == ([0], [])


# ---- 行计算与门限 ----

def test_identical_pair_control(unit_square, settings):
    evaluator = PairEvaluator(sweep_config(), settings)
    values = evaluator.evaluate(GeneratedPair(unit_square, unit_square, 0.0, 0.0, 0.0))
    assert values["dbl_0"] == 0.0
    assert values["ratio_dbl_0"] == 0.0
    assert values["dT_perimeter2d"] == 0.0
    assert values["tv_area"] == 0.0
    assert values["area_bound_ok"] == 1.0


def synthetic_report(dbl, area_ok=1.0, deltas=DELTAS) -> SweepReport:
    rows = []
    for d in deltas:
        values = {
            "delta": d,
            "d_h": d,
            "dbl_0": dbl(d),
            "ratio_dbl_0": dbl(d) / math.sqrt(d),
            "dT_perimeter2d": 0.1 * d ** 0.2,
            "dT_perimeter2d_err": 0.0,
            "ratio_dT_perimeter2d": 0.1,
            "area_bound_ok": area_ok if d == min(deltas) else 1.0,
        }
        rows.append(SweepRow(d, values))
    return SweepReport(sweep_config(), rows, dim=2)


def test_gates_pass_for_square_root_rate(settings):
    report = synthetic_report(lambda d: 0.5 * math.sqrt(d))
    evaluate_gates(report, settings)
    names = [g.name for g in report.gates]
    assert names == ["finite_ratios", "slope:dbl_0", "stable:ratio_dbl_0",
                     "stable:ratio_dT_perimeter2d", "area_marginal"]
    assert report.passed
    assert report.fits["dbl_0:lower"].slope == pytest.approx(0.5)


def test_gates_fail_for_flat_distance(settings):
    report = synthetic_report(lambda d: 0.3, area_ok=0.0)
    evaluate_gates(report, settings)
    failed = {g.name for g in report.gates if not g.passed}
    assert failed == {"slope:dbl_0", "stable:ratio_dbl_0", "area_marginal"}
    assert not report.passed


def test_short_grid_cannot_pass_slope_gate(settings):
    report = synthetic_report(lambda d: 0.5 * math.sqrt(d), deltas=(0.1, 0.05, 0.02, 0.01))
    evaluate_gates(report, settings)
    gates = {g.name: g for g in report.gates}
    assert not gates["slope:dbl_0"].passed
    assert "无法判定" in gates["slope:dbl_0"].detail
    assert not report.passed


def test_single_delta_cannot_pass_stability_gate(settings):
    report = synthetic_report(lambda d: 0.5 * math.sqrt(d), deltas=(0.05,))
    evaluate_gates(report, settings)
    failed = {g.name for g in report.gates if not g.passed}
    assert {"slope:dbl_0", "stable:ratio_dbl_0", "stable:ratio_dT_perimeter2d"} <= failed


def test_report_writer(tmp_path, settings):
    report = synthetic_report(lambda d: 0.5 * math.sqrt(d))
    evaluate_gates(report, settings)
    paths = ReportWriter(str(tmp_path)).write(report)

    header, columns = read_report_csv(paths["csv"])
    assert header[:3] == ["delta", "d_h", "dbl_0"]
    np.testing.assert_array_equal(columns["delta"], DELTAS)

    with open(paths["json"], encoding="utf-8") as f:
        sidecar = json.load(f)
    assert sidecar["seed"] == 0
    assert sidecar["passed"] is True
    assert sidecar["config"]["deltas"] == list(DELTAS)
    assert {"python", "numpy", "scipy"} <= set(sidecar["environment"])
    assert "unit_test" in open(paths["markdown"], encoding="utf-8").read()


class CapturingWriter:
    def __init__(self):
        self.reports = []

    def write(self, report):
        self.reports.append(report)


def test_failed_rows_write_partial_report(settings):
    writer = CapturingWriter()
    cfg = sweep_config(scenario="vertex-perturb", base="config/bodies/unit_disk.json", deltas=[0.1, 0.05])
    with pytest.raises(SweepRowError) as excinfo:
        run_sweep(cfg, settings, writer)
    assert excinfo.value.delta == 0.1
    assert len(writer.reports) == 1
    assert writer.reports[0].partial
    assert not writer.reports[0].passed


@pytest.mark.slow
def test_sweep_is_reproducible(tmp_path, settings):
    cfg = sweep_config(deltas=[0.2, 0.1, 0.05])
    first = ReportWriter(str(tmp_path / "a")).write(run_sweep(cfg, settings))
    second = ReportWriter(str(tmp_path / "b")).write(run_sweep(cfg, settings))
    with open(first["csv"], "rb") as a, open(second["csv"], "rb") as b:
        assert a.read() == b.read()
    header, _ = read_report_csv(first["csv"])
    for column in ("delta", "d_h", "dbl_0", "ratio_dbl_0", "dT_perimeter2d", "dT_perimeter2d_err",
                   "ratio_dT_perimeter2d", "area_bound_ok"):
        assert column in header


@pytest.mark.slow
@pytest.mark.parametrize("name", ["translate_square", "rotate_square"])
def test_square_sweeps_reach_square_root_rate(name, settings):
    cfg = SweepConfig.load(f"config/sweeps/{name}.json").with_overrides(forms=["perimeter2d"], oracle=False)
    report = run_sweep(cfg, settings)
    gates = {g.name: g for g in report.gates}
    for i in (0, 1):
        assert gates[f"slope:dbl_{i}"].passed, gates[f"slope:dbl_{i}"].detail
        assert report.fits[f"dbl_{i}:lower"].slope >= settings.sweep.slope_min


# ---- 命令行 ----

def test_cli_bodies_validate(clean_env, capsys):
    assert main(["bodies", "validate", "config/bodies/unit_square.json"]) == 0
    assert "V_2=1" in capsys.readouterr().out


def test_cli_missing_file(clean_env):
    assert main(["bodies", "validate", "config/bodies/no_such_body.json"]) == 1


def test_cli_nc_eval(clean_env, capsys):
    assert main(["nc", "eval", "config/bodies/unit_square.json", "--form", "perimeter2d"]) == 0
    line = next(text for text in capsys.readouterr().out.splitlines() if "T_K(perimeter2d)" in text)
    value = float(line.split("=")[1].split("，")[0])
    assert value == pytest.approx(4.0, abs=1e-10)


def test_cli_measures_exact_and_dbl(clean_env, tmp_path):
    prefix = str(tmp_path / "square")
    assert main(["measures", "exact", "config/bodies/unit_square.json", "--index", "1", "--out", prefix]) == 0
    measure = DiscreteMeasure.load(f"{prefix}_1.json")
    assert measure.total_mass == pytest.approx(2.0)
    assert main(["dbl", f"{prefix}_1.json", f"{prefix}_1.json"]) == 0


def test_cli_sweep_fit(clean_env, tmp_path, capsys):
    path = tmp_path / "report.csv"
    d = np.array(DELTAS)
    lines = ["d_h,dbl_0,dbl_0_err"] + [f"{x!r},{math.sqrt(x)!r},0.0" for x in d]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert main(["sweep", "fit", str(path)]) == 0
    out = capsys.readouterr().out
    assert "dbl_0: 斜率 0.5000" in out
    assert "dbl_0_err" not in out
