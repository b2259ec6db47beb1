import csv
import io
import json
import math

import pytest

from ising_fluct import cli
from ising_fluct.chains import dimer
from ising_fluct.chains.free_fermion import level_spacing


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_point_dimer(capsys):
    code, out = run(capsys, "point", "--system", "dimer", "--lambda", "2")
    assert code == 0
    document = json.loads(out)
    assert document["schema"] == cli.SCHEMA
    result = document["result"]
    assert result["C"] == pytest.approx(0.70711, abs=1e-5)
    assert result["S"] == pytest.approx(0.4165, abs=5e-4)
    assert result["dS"] == pytest.approx(0.6232, abs=5e-4)


def test_point_ordered_limit(capsys):
    code, out = run(capsys, "point", "--lambda", "1e9")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["S"] == pytest.approx(math.log(2.0), abs=1e-6)
    assert result["dS"] == pytest.approx(0.0, abs=1e-6)
    assert result["phase"] == "ordered"


def test_point_critical_point_is_numerical_failure(capsys, caplog):
    code, out = run(capsys, "point", "--lambda", "1")
    assert code == cli.EXIT_NUMERICAL
    assert out == ""
    assert "asymptote_S" in caplog.text


def test_point_with_series(capsys):
    code, out = run(capsys, "point", "--lambda", "0.5", "--series")
    result = json.loads(out)["result"]
    assert result["S_series"] == pytest.approx(result["S"], abs=1e-10)
    assert result["dS_series"] == pytest.approx(result["dS"], abs=1e-8)


def test_two_site_chain_matches_dimer(capsys):
    _, out = run(capsys, "point", "--L", "2", "--lambda", "2")
    finite = json.loads(out)
    _, out = run(capsys, "finite", "--L", "2", "--lambda", "2")
    assert json.loads(out) == finite
    assert finite["inputs"]["system"] == "finite"
    exact = dimer.dimer_stats(2.0)
    assert finite["result"]["S"] == pytest.approx(exact.S, abs=1e-10)
    assert finite["result"]["dS"] == pytest.approx(exact.dS, abs=1e-10)


def test_sweep(capsys):
    code, out = run(
        capsys, "sweep", "--from", "0.05", "--to", "0.95", "--points", "10", "--quantities", "S"
    )
    assert code == 0
    assert out.splitlines()[0] == "lambda,S"
    values = [float(r["S"]) for r in rows_of(out)]
    assert len(values) == 10
    assert all(a < b for a, b in zip(values, values[1:]))


def test_sweep_skips_critical_point(capsys, caplog):
    code, out = run(capsys, "sweep", "--from", "0.5", "--to", "1.5", "--points", "3")
    assert code == 0
    assert [float(r["lambda"]) for r in rows_of(out)] == [0.5, 1.5]
    assert "critical point" in caplog.text


def test_sweep_ordered_delta_below_maximum(capsys):
    _, out = run(
        capsys, "sweep", "--from", "2", "--to", "3", "--points", "20", "--quantities", "delta"
    )
    assert all(float(r["delta"]) < 0.7957 for r in rows_of(out))


def test_sweep_series_columns(capsys):
    _, out = run(capsys, "sweep", "--from", "0.2", "--to", "0.8", "--points", "4", "--series")
    assert out.splitlines()[0] == "lambda,S,S_series,dS,dS_series,delta"
    for row in rows_of(out):
        assert float(row["S"]) == pytest.approx(float(row["S_series"]), abs=1e-10)


def test_sweep_seventeen_digits(capsys):
    _, out = run(
        capsys, "sweep", "--from", "0.3", "--to", "0.4", "--points", "2", "--quantities", "eps"
    )
    row = rows_of(out)[0]
    assert float(row["eps"]) == level_spacing(0.3)


def test_sweep_json(capsys):
    _, out = run(
        capsys, "sweep", "--from", "0.5", "--to", "4", "--points", "3", "--scale", "log",
        "--format", "json",
    )
    document = json.loads(out)
    assert document["inputs"]["scale"] == "log"
    assert [r["lambda"] for r in document["rows"]] == pytest.approx([0.5, math.sqrt(2.0), 4.0])
    assert set(document["rows"][0]) == {"lambda", "S", "dS", "delta"}


def test_sweep_workers_keep_order(capsys):
    argv = ["sweep", "--from", "0.1", "--to", "3", "--points", "40", "--series"]
    _, serial = run(capsys, *argv)
    _, threaded = run(capsys, *argv, "--workers", "4")
    assert serial == threaded


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--from", "0.9", "--to", "0.1", "--points", "4"],
        ["sweep", "--from", "0.1", "--to", "0.9", "--points", "1"],
        ["sweep", "--from", "0.1", "--to", "0.9", "--points", "4", "--quantities", "X"],
        ["sweep", "--from", "0.1", "--to", "0.9", "--points", "4", "--colour"],
        ["figure", "fig9"],
        ["finite", "--L", "20", "--lambda", "1"],
        ["point", "--L", "4", "--cut", "9", "--lambda", "1"],
        ["point", "--lambda", "-1"],
        ["point", "--system", "dimer", "--lambda", "inf"],
        ["renyi", "--lambda", "0.5", "--alpha", "0"],
        ["renyi", "--lambda", "0", "--alpha", "2"],
        ["peak", "--L", "1"],
        ["bogus"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _ = run(capsys, *argv)
    assert code == cli.EXIT_USAGE


def test_figure_one_crossing(capsys):
    code, out = run(capsys, "figure", "fig1")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 601
    assert out.splitlines()[1] == "0,0,0,0,"
    crossing = [
        float(b["lambda"])
        for a, b in zip(rows, rows[1:])
        if float(a["lambda"]) > 0.5
        and (float(a["dS"]) - float(a["S"])) * (float(b["dS"]) - float(b["S"])) <= 0.0
    ]
    assert crossing == [pytest.approx(2.95, abs=0.011)]


def test_figure_two_self_dual_row(capsys):
    _, out = run(capsys, "figure", "fig2")
    rows = rows_of(out)
    row = min(rows, key=lambda r: abs(float(r["lambda"]) - 1.0 / math.sqrt(2.0)))
    assert float(row["eps"]) == pytest.approx(math.pi, rel=1e-12)
    assert all(float(r["lambda"]) != 1.0 for r in rows)


def test_figure_five_maximum(capsys):
    _, out = run(capsys, "figure", "fig5")
    rows = [r for r in rows_of(out) if r["delta"] != ""]
    best = max(rows, key=lambda r: float(r["delta"]))
    assert float(best["lambda"]) == pytest.approx(1.0044, abs=1e-3)
    assert float(best["delta"]) == pytest.approx(0.7957, abs=5e-4)


def test_figure_three_is_deterministic(capsys):
    _, first = run(capsys, "figure", "fig3")
    _, second = run(capsys, "figure", "fig3")
    assert first == second
    assert first.splitlines()[0] == "lambda,S,dS"


def test_roots_dimer(capsys):
    code, out = run(capsys, "roots", "dimer-lf")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["lambda_f"] == pytest.approx(2.9447, abs=5e-4)
    assert result["bracket_width"] >= 0.0


def test_roots_infinite(capsys):
    _, out = run(capsys, "roots", "inf-lf")
    assert json.loads(out)["result"]["lambda_f"] == pytest.approx(0.999951, abs=1e-5)
    _, out = run(capsys, "roots", "inf-lm")
    result = json.loads(out)["result"]
    assert result["lambda_m"] == pytest.approx(1.0044, abs=1e-3)
    assert result["delta_m"] == pytest.approx(0.7957, abs=5e-4)


def test_verify_default_is_deterministic(capsys):
    code, first = run(capsys, "verify")
    assert code == cli.EXIT_OK
    report = json.loads(first)["result"]
    assert report["passed"]
    assert report["n_failed"] == 0
    names = {r["name"] for r in report["reports"]}
    assert names == set(cli.identities.IDENTITY_FAMILIES) | {"S_series", "D_series"}
    _, second = run(capsys, "verify")
    assert first == second


def test_verify_only(capsys):
    code, out = run(capsys, "verify", "--only", "A5")
    assert code == 0
    reports = json.loads(out)["result"]["reports"]
    assert len(reports) == 19
    assert {r["name"] for r in reports} == {"A5"}


def test_verify_precision_floor(capsys):
    code, out = run(capsys, "verify", "--tol", "1e-16", "--only", "A1", "--only", "A5")
    assert code == cli.EXIT_NUMERICAL
    assert json.loads(out)["result"]["passed"] is False


def test_verify_tolerance_from_config(tmp_path, capsys):
    path = tmp_path / "tight.yaml"
    path.write_text("verify:\n  tol: 1.0e-16\n")
    code, out = run(capsys, "verify", "-c", str(path), "--only", "A5")
    assert code == cli.EXIT_NUMERICAL
    assert json.loads(out)["inputs"]["tol"] == 1e-16


def test_renyi_dimer(capsys):
    code, out = run(capsys, "renyi", "--system", "dimer", "--lambda", "2", "--alpha", "2")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["renyi"] == pytest.approx(-math.log(0.75), rel=1e-13)
    assert result["round_trip_residual"] < 1e-13


def test_renyi_alpha_one_is_von_neumann(capsys):
    _, out = run(capsys, "renyi", "--lambda", "0.5", "--alpha", "1")
    result = json.loads(out)["result"]
    _, out = run(capsys, "point", "--lambda", "0.5")
    S = json.loads(out)["result"]["S"]
    assert result["renyi"] == pytest.approx(S, abs=1e-12)
    assert result["tsallis"] == result["renyi"]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "fig4.csv"
    code, out = run(capsys, "figure", "fig4", "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[0] == "lambda,delta"


def test_numerical_failure_logs_traceback(capsys, caplog):
    code, _ = run(capsys, "point", "--lambda", "1")
    assert code == cli.EXIT_NUMERICAL
    tracebacks = [r for r in caplog.records if "traceback" in r.getMessage()]
    assert tracebacks and all(r.levelname == "ERROR" for r in tracebacks)


def test_point_far_ordered_fluctuation(capsys):
    _, out = run(capsys, "point", "--lambda", "1e4")
    result = json.loads(out)["result"]
    assert result["dS"] == pytest.approx(2.65e-8, rel=1e-2)
    assert result["delta"] > 0.0


def test_renyi_moments(capsys):
    code, out = run(
        capsys, "renyi", "--system", "dimer", "--lambda", "2", "--alpha", "2", "--moments"
    )
    assert code == 0
    result = json.loads(out)["result"]
    exact = dimer.dimer_stats(2.0)
    assert result["first_moment"] == pytest.approx(exact.S, abs=1e-6)
    assert result["D"] == pytest.approx(exact.D, abs=2e-5)


def test_peak_grows_with_chain_length(capsys):
    code, out = run(capsys, "peak", "--L", "4", "--L", "6")
    assert code == 0
    assert out.splitlines()[0] == "L,lambda,dS"
    small, large = rows_of(out)
    assert (small["L"], large["L"]) == ("4", "6")
    assert abs(float(large["lambda"]) - 1.0) < abs(float(small["lambda"]) - 1.0)
    assert float(large["dS"]) > float(small["dS"])


def test_peak_reads_scan_settings(tmp_path, capsys):
    path = tmp_path / "coarse.yaml"
    path.write_text("finite_chain:\n  scan_points: 50\n  xtol: 1.0e-3\n")
    _, coarse = run(capsys, "peak", "--L", "4", "-c", str(path), "--format", "json")
    _, fine = run(capsys, "peak", "--L", "4", "--format", "json")
    coarse_row, fine_row = json.loads(coarse)["rows"][0], json.loads(fine)["rows"][0]
    assert coarse_row["lambda"] == pytest.approx(fine_row["lambda"], abs=2e-3)
    assert coarse_row["lambda"] != fine_row["lambda"]


def test_verify_series_rows_name_lambda(capsys):
    code, out = run(capsys, "verify", "--only", "series")
    assert code == 0
    reports = json.loads(out)["result"]["reports"]
    assert len(reports) == 2 * len(cli.SERIES_CHECK_GRID)
    assert len({(r["name"], r["lambda"]) for r in reports}) == len(reports)
