import csv
import io
import json
from fractions import Fraction
from importlib import resources

import jsonschema
import pytest

from qunet.cli import main
from qunet.constructions import vdc_matrices
from qunet.geometry import analyze
from qunet.pointgen import generate_points, read_points


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(command):
    text = resources.files("qunet").joinpath(f"schemas/{command}.schema.json").read_text()
    return json.loads(text)


def run_json(capsys, command, *argv):
    code, out, _ = run(capsys, command, "--json", *argv)
    report = json.loads(out)
    jsonschema.validate(report, schema(command))
    return code, report


def test_generate_then_analyze_matches_the_library(tmp_path, capsys):
    path = tmp_path / "vdc.txt"
    code, report = run_json(capsys, "generate", "vdc", "--b", "2", "--m", "6", "--out", str(path))
    assert code == 0 and report["N"] == 64
    assert read_points(path) == generate_points(vdc_matrices(2, 6))
    code, report = run_json(capsys, "analyze", str(path))
    rep = analyze(generate_points(vdc_matrices(2, 6)))
    assert report["q"] == f"{rep.q.numerator}/{rep.q.denominator}"
    assert report["rho_upper"] == "2/1"
    assert report["t_boxcount"] == 0


def test_generate_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "hammersley", "--b", "3", "--m", "2")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "3 2 2 9" and len(lines) == 10


@pytest.mark.parametrize("method", ["criterion", "bruteforce"])
def test_check_sep_reports(capsys, method):
    code, report = run_json(capsys, "check-sep", "--construction", "lp", "--m", "8", "--shift-seed", "7",
                            "--method", method, "--toroidal")
    assert code == 0 and report["kappa"] is not None
    code, one = run_json(capsys, "check-sep", "--construction", "lp", "--m", "8", "--method", method,
                         "--c", "5,4")
    assert one["status"] == "separated"


def test_both_separation_methods_agree(capsys):
    kappas = set()
    for method in ("criterion", "bruteforce"):
        _, report = run_json(capsys, "check-sep", "--construction", "lp", "--m", "10", "--shift-seed", "3",
                             "--method", method, "--toroidal")
        kappas.add(report["kappa"])
    assert len(kappas) == 1


def test_tvalue_of_a_polylattice(capsys):
    code, report = run_json(capsys, "tvalue", "--construction", "polylattice",
                            "--p", "2: 1 1 0 0 1", "--q", "2: 1", "--q", "2: 0 1 1")
    assert code == 0
    assert report["t"] == report["t_from_continued_fraction"]


def test_reproduce_exit_codes(capsys):
    code, report = run_json(capsys, "reproduce", "faure")
    assert code == 0 and report["verdict"] == "pass"
    code, report = run_json(capsys, "reproduce", "hammersley", "--b", "2", "--m", "4")
    assert code == 1 and report["verdict"] == "fail"


def test_csv_columns(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "fibonacci", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows
    assert list(rows[0]) == ["scenario", "params", "check", "claimed", "measured", "passed"]
    code, out, _ = run(capsys, "tvalue", "--construction", "faure", "--b", "3", "--m", "4", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"construction": rows[0]["construction"], "b": "3", "m": "4", "d": "3", "t": "0"}]


@pytest.mark.parametrize("argv", [
    ["generate", "sobol2", "--m", "3", "--variant", "XY"],
    ["generate", "vdc", "--b", "4", "--m", "3"],
    ["analyze", "/nonexistent/points.txt"],
    ["check-sep", "--construction", "lp", "--m", "4", "--c", "1,2,3"],
    ["tvalue", "--construction", "vdc", "--m", "21"],
])
def test_bad_input_exits_with_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_with_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "nosuchnet"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "x", "--json", "--csv"])
    assert exc.value.code == 2


def test_scramble_search_report(capsys):
    code, report = run_json(capsys, "scramble-search", "--m", "5", "--trials", "12", "--seed", "2")
    assert code == 0
    assert sum(report["scaled_q_histogram"].values()) == 12
    best = max(map(Fraction, report["scaled_q_histogram"]))
    assert best == 32 * Fraction(report["best_q"])
    _, again = run_json(capsys, "scramble-search", "--m", "5", "--trials", "12", "--seed", "2")
    assert again == report
    code, _, _ = run(capsys, "scramble-search", "--m", "0")
    assert code == 2
