"""Tests for the command-line interface."""

import json
import math

import pytest

from minkowski_sc.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from minkowski_sc.curves import make_curve
from minkowski_sc.storage import save_curve


@pytest.fixture
def backtracking_file(tmp_path, backtracking_curve):
    return save_curve(backtracking_curve, tmp_path / "back.csv")


@pytest.fixture
def zigzag_file(tmp_path):
    curve = make_curve([[0.0, 0.0], [1.0, 0.2], [1.6, 0.0], [1.9, 0.05], [2.0, 0.0]])
    return save_curve(curve, tmp_path / "zigzag.csv")


def read_json(path):
    return json.loads(path.read_text())


def test_version(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0
    assert "minkowski-sc" in capsys.readouterr().out


def test_alpha0_command(tmp_path):
    output = tmp_path / "alpha0.json"
    assert main(["alpha0", "--norm", "lp:4", "--output", str(output)]) == EXIT_OK
    report = read_json(output)
    assert report["norm"] == "lp:4"
    assert report["alpha0"] == pytest.approx(math.acos(1 / 3), abs=1e-9)
    assert report["config"]["command"] == "alpha0"
    assert report["config"]["resolution"] == 4096


def test_alpha0_to_stdout(capsys):
    assert main(["alpha0", "--norm", "euclid"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["sin_alpha0"] == pytest.approx(1.0)


def test_invalid_norm_is_input_error(capsys):
    assert main(["alpha0", "--norm", "lp:1.5"]) == EXIT_INPUT
    assert "p must be ≥ 2" in capsys.readouterr().err


def test_kappa_command(tmp_path):
    output = tmp_path / "kappa.json"
    assert main(["kappa", "--norm", "euclid", "--no-refine", "--output", str(output)]) == EXIT_OK
    assert read_json(output)["kappa"] <= 1e-8


def test_kappa_command_skewed_norm(tmp_path, fixtures_dir):
    expected = read_json(fixtures_dir / "lp4_bundle.json")
    output = tmp_path / "kappa.json"
    code = main(["kappa", "--norm", "alp:4:1,0.5,0,2", "--no-refine", "--output", str(output)])
    assert code == EXIT_OK
    assert 0.0 < read_json(output)["kappa"] <= expected["kappa"] + 2e-3


def test_norm_info_command(tmp_path):
    output = tmp_path / "info.json"
    assert main(["norm-info", "--norm", "euclid", "--output", str(output)]) == EXIT_OK
    report = read_json(output)
    assert list(report["bundle"])[-2:] == ["c0", "C"]
    assert report["bundle"]["lambda"] == pytest.approx(0.5, abs=1e-8)


def test_norm_info_lp4_matches_fixture(tmp_path, fixtures_dir):
    expected = read_json(fixtures_dir / "lp4_bundle.json")
    output = tmp_path / "info.json"
    assert main(["norm-info", "--norm", "lp:4", "--output", str(output)]) == EXIT_OK
    report = read_json(output)
    assert report["alpha0"] == pytest.approx(expected["alpha0"], abs=1e-9)
    assert report["kappa"] == pytest.approx(expected["kappa"], abs=1e-4)
    bundle = report["bundle"]
    assert list(bundle) == [key for key in expected if key not in ("norm", "source")]
    assert bundle["tau1"] == pytest.approx(expected["tau1"], abs=1e-9)
    assert bundle["lambda"] == pytest.approx(expected["lambda"], abs=1e-4)
    assert bundle["c0"] == pytest.approx(expected["c0"], rel=2e-3)
    assert bundle["C"] == pytest.approx(1 / bundle["c0"])


def test_bisector_command(tmp_path):
    csv_path = tmp_path / "trace.csv"
    report_path = tmp_path / "trace.json"
    svg_path = tmp_path / "trace.svg"
    code = main(
        [
            "bisector",
            "--norm", "lp:4",
            "--a", "0", "0",
            "--b", "2", "1",
            "--samples", "21",
            "--output", str(csv_path),
            "--report", str(report_path),
            "--svg", str(svg_path),
        ]
    )
    assert code == EXIT_OK
    assert len(csv_path.read_text().splitlines()) == 22
    report = read_json(report_path)
    assert report["failed_samples"] == 0
    assert report["outside_strip"] == 0
    assert [row["R"] for row in report["deviations"]] == [10, 30, 100, 300, 1000]
    assert -1.15 <= report["deviation_slope"] <= -0.85
    assert svg_path.read_text().startswith("<svg")


def test_bisector_degenerate_segment(capsys):
    assert main(["bisector", "--a", "1", "1", "--b", "1", "1"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_generate_then_verify(tmp_path):
    curve_path = tmp_path / "greedy.csv"
    report_path = tmp_path / "verify.json"
    assert main(["generate", "--n", "25", "--seed", "7", "--output", str(curve_path)]) == EXIT_OK
    assert len(curve_path.read_text().splitlines()) == 26
    code = main(["verify", "--curve", str(curve_path), "--output", str(report_path)])
    assert code == EXIT_OK
    report = read_json(report_path)
    assert report["is_self_contracted"]
    assert report["checked_triples"] == 25 * 24 * 26 // 6
    assert report["triple_cosine"]["holds"]


def test_generate_to_stdout(capsys):
    assert main(["generate", "--n", "5", "--seed", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,x,y"
    assert lines[1] == "0,0,0"
    assert len(lines) == 6


def test_generate_gradient_descent(tmp_path):
    curve_path = tmp_path / "gd.csv"
    code = main(
        ["generate", "--method", "gd", "--n", "30", "--potential", "quad:1,4",
         "--output", str(curve_path)]
    )
    assert code == EXIT_OK
    assert len(curve_path.read_text().splitlines()) == 31


def test_verify_backtracking_curve(tmp_path, backtracking_file):
    report_path = tmp_path / "verify.json"
    code = main(["verify", "--norm", "euclid", "--curve", str(backtracking_file),
                 "--output", str(report_path)])
    assert code == EXIT_NEGATIVE
    report = read_json(report_path)
    assert report["worst_violation"]["defect"] == pytest.approx(0.2)
    assert "triple_cosine" not in report


def test_verify_missing_file(tmp_path, capsys):
    assert main(["verify", "--curve", str(tmp_path / "missing.csv")]) == EXIT_INPUT
    assert "not found" in capsys.readouterr().err


def test_verify_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("t,x,y\n0,0,0\n1,oops,0\n")
    assert main(["verify", "--curve", str(path)]) == EXIT_INPUT
    assert "line 3" in capsys.readouterr().err


def test_certify_is_deterministic(tmp_path):
    outputs = [tmp_path / "first.json", tmp_path / "second.json"]
    for output in outputs:
        code = main(
            ["certify", "--norm", "euclid", "--seed", "42", "--count", "2", "--n", "20",
             "--output", str(output)]
        )
        assert code == EXIT_OK
    first, second = (read_json(output) for output in outputs)
    assert first.pop("config")["output"] != second.pop("config")["output"]
    assert first == second
    report = first
    assert [entry["seed"] for entry in report["curves"]] == [42, 43]
    for entry in report["curves"]:
        assert entry["ratio"] <= report["C"]
        assert entry["min_decrement_slack"] >= -1e-9
        assert entry["pairs_checked"] == 190
        assert entry["lemma_violations"] == 0
        assert entry["pair_failures"] == 0


def test_certify_curve_file(tmp_path, zigzag_file):
    output = tmp_path / "certify.json"
    code = main(["certify", "--norm", "euclid", "--curve", str(zigzag_file), "--no-pairs",
                 "--output", str(output)])
    assert code == EXIT_OK
    entry = read_json(output)["curves"][0]
    assert entry["seed"] is None
    assert "pairs_checked" not in entry


def test_certify_rejects_non_self_contracted(tmp_path, backtracking_file):
    output = tmp_path / "certify.json"
    code = main(["certify", "--norm", "euclid", "--curve", str(backtracking_file),
                 "--output", str(output)])
    assert code == EXIT_NEGATIVE
    assert not output.exists()


def test_bound_report_with_given_angles(tmp_path, zigzag_file):
    output = tmp_path / "bound.json"
    code = main(
        ["bound-report", "--norm", "euclid", "--curve", str(zigzag_file),
         "--alpha0", str(math.pi / 2), "--kappa", "0", "--output", str(output)]
    )
    assert code == EXIT_OK
    report = read_json(output)
    assert report["c0"] == pytest.approx(math.asin(1 / 96) / (384 * math.pi))
    assert report["max_ratio"] == pytest.approx(report["curves"][0]["ratio"])


def test_plot_command(tmp_path, zigzag_file):
    output = tmp_path / "curve.svg"
    assert main(["plot", "--curve", str(zigzag_file), "--output", str(output)]) == EXIT_OK
    assert output.read_text().startswith("<svg")
