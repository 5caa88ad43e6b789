import json

import joblib
import pytest

from src.cli import EXIT_INPUT, EXIT_OK, main


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_analyze_lightcone(capsys, paths):
    code, report = run_json(capsys, ["analyze", paths.lightcone_json])
    assert code == EXIT_OK
    assert report["schema_version"] == "1.0"
    assert report["conical"] is True
    assert report["minimality"]["verdict"] == "minimal"
    assert report["nondegeneracy"]["order"] == 2
    assert report["levi_kernel_dim"] == 1


def test_analyze_orbit_reports_kernel_chain(capsys, paths):
    code, report = run_json(capsys, ["analyze", paths.ey1_json])
    assert code == EXIT_OK
    assert report["kernel_chain"]["dims"] == [2, 1, 0]


def test_hol_is_deterministic(capsys, paths):
    first = run_json(capsys, ["hol", paths.ey1_json])
    second = run_json(capsys, ["hol", paths.ey1_json])
    assert first == second
    code, report = first
    assert code == EXIT_OK
    assert report["hol"]["graded_dims"] == {"-1": 3, "0": 2}
    assert report["isotropy"]["dim_M"] == 5


def test_hol_save_and_termination(capsys, paths, tmp_path):
    target = tmp_path / "hol.joblib"
    code, report = run_json(capsys, ["hol", paths.lightcone_json, "--save", str(target), "--verify-termination"])
    assert code == EXIT_OK
    assert report["termination_check"] == {"2": 0, "3": 0}
    G = joblib.load(target)
    assert G.dim == 10


def test_report_written_to_file(capsys, paths, tmp_path):
    target = tmp_path / "lightcone_report.json"
    code, report = run_json(capsys, ["analyze", paths.lightcone_json, "--out", str(target)])
    assert code == EXIT_OK
    assert json.loads(target.read_text()) == report


def test_compare(capsys, paths):
    code, report = run_json(capsys, ["compare", paths.ey1_json, paths.ex_m2_json])
    assert code == EXIT_OK
    assert report["comparison"]["verdict"] == "distinct"
    assert "sigma" in report["comparison"]["reasons"]


def test_endocone(capsys, paths):
    code, report = run_json(capsys, ["endocone", f"{paths.data_dir}/endocone_ey1.json"])
    assert code == EXIT_OK
    assert report["endocone"]["du_condition"] is True
    assert report["endocone"]["predicted_hol"]["total"] == 5


def test_endocone_base_override(capsys, paths):
    code, report = run_json(capsys, ["endocone", f"{paths.data_dir}/endocone_ey1.json", "--a", "0,0,1"])
    assert code == EXIT_OK
    assert report["endocone"]["cyclic"] is False


def test_catalog_run(capsys):
    code, report = run_json(capsys, ["catalog", "run", "EX", "--params", "alpha=-2"])
    assert code == EXIT_OK
    assert report["passed"] is True
    assert {row["entry"] for row in report["ledger"]} == {"EX(alpha=-2)"}


def test_catalog_list(capsys):
    code, report = run_json(capsys, ["catalog", "list"])
    assert code == EXIT_OK
    assert len(report["entries"]) == 8


def test_catalog_text_output(capsys):
    assert main(["catalog", "list"]) == EXIT_OK
    assert "EV" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "does-not-exist.json"],
        ["catalog", "run"],
        ["catalog", "run", "EY", "--params", "alpha=-1"],
    ],
)
def test_input_errors(capsys, argv):
    assert main(argv) == EXIT_INPUT
    assert "[" in capsys.readouterr().err


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", str(bad)]) == EXIT_INPUT


def test_refused_input(capsys, tmp_path):
    paraboloid = {
        "kind": "orbit",
        "n": 3,
        "generators": [
            {"linear": [["0", "0", "0"], ["0", "0", "0"], ["2", "0", "0"]], "const": ["1", "0", "0"]},
            {"linear": [["0", "0", "0"], ["0", "0", "0"], ["0", "2", "0"]], "const": ["0", "1", "0"]},
        ],
        "base_point": ["0", "0", "0"],
    }
    path = tmp_path / "paraboloid.json"
    path.write_text(json.dumps(paraboloid))
    code, report = run_json(capsys, ["hol", str(path)])
    assert code == EXIT_INPUT
    assert report["error"].startswith("[hol_solver]")


@pytest.mark.parametrize("d", ["1/2", 1.5, [1]])
def test_endocone_rejects_non_integer_d(capsys, tmp_path, d):
    path = tmp_path / "endocone.json"
    path.write_text(json.dumps({"phi": [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "1"]], "d": d, "a": ["1", "0", "1"]}))
    code, report = run_json(capsys, ["endocone", str(path)])
    assert code == EXIT_INPUT
    assert "'d' must be an integer" in report["error"]
