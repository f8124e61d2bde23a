import csv
import io
import json

import pytest

from fricke3 import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_json(capsys):
    code, out, _ = run(capsys, "expand", "--form", "j3plus", "--order", "3")
    doc = json.loads(out)
    assert code == 0 and doc["valuation"] == -1 and doc["coeffs"] == ["1", "0", "783", "8672", "65367"]


def test_expand_csv(capsys):
    code, out, _ = run(capsys, "expand", "--form", "delta3r", "--r", "8", "--order", "3", "--format", "csv")
    assert code == 0 and out.startswith("n,coefficient\r\n")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1:] == [["0", "0"], ["1", "1"], ["2", "6"], ["3", "-27"]]


def test_basis_is_deterministic(capsys, tmp_path):
    args = ("basis", "--k", "4", "--m", "3", "--cache-dir", str(tmp_path))
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second and first[0] == 0
    doc = json.loads(first[1])
    assert doc["poly"][-1] == "1" and doc["degree"] == 3


def test_zeros(capsys):
    code, out, _ = run(capsys, "zeros", "--k", "0", "--m", "3", "--bits", "256", "--grid", "200")
    doc = json.loads(out)
    assert code == 0 and doc["found"] == 3 and doc["valence_audit"] == "0"


def test_zeros_csv(capsys):
    code, out, _ = run(capsys, "zeros", "--k", "4", "--m", "2", "--bits", "256", "--grid", "100", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["index", "theta", "in_tail"] and len(rows) == 3


def test_verify_aggregation(capsys, tmp_path):
    target = tmp_path / "agg.json"
    code, out, _ = run(capsys, "verify", "--suite", "prop2.4", "--out", str(target))
    doc = json.loads(target.read_text())
    assert code == 0 and out == "" and doc["all_pass"]
    assert len(doc["reports"]) == 10


def test_contour_check(capsys):
    code, out, _ = run(capsys, "contour-check", "--k", "0", "--m", "23", "--theta", "1.9", "--regime", "low", "--bits", "256")
    doc = json.loads(out)
    assert code == 0 and float(doc["residual"]) < 1e-10


@pytest.mark.parametrize("argv", [
    ["zeros", "--k", "0", "--m", "3", "--bits", "64"],
    ["zeros", "--k", "0", "--m", "3", "--grid", "8"],
    ["zeros", "--k", "0", "--m", "3", "--jobs", "0"],
])
def test_bad_config_is_usage_error(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [["bogus"], ["zeros", "--k", "0"], ["verify", "--suite", "nope"], []])
def test_argparse_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_computation_failure_exit_code(capsys):
    code, _, err = run(capsys, "basis", "--k", "0", "--m", "-5")
    assert code == 1 and "basis failed" in err


def test_environment_and_flag_precedence(tmp_path):
    parser = cli.build_parser()
    env = {"FRICKE3_PRECISION": "300", "FRICKE3_CACHE_DIR": str(tmp_path)}
    cfg = cli.RunConfig.from_args(parser.parse_args(["zeros", "--k", "0", "--m", "1"]), env)
    assert cfg.precision_bits == 300 and cfg.cache_dir == tmp_path
    cfg = cli.RunConfig.from_args(parser.parse_args(["zeros", "--k", "0", "--m", "1", "--bits", "512",
                                                     "--cache-dir", "/x"]), env)
    assert cfg.precision_bits == 512 and str(cfg.cache_dir) == "/x"
    cfg = cli.RunConfig.from_args(parser.parse_args(["zeros", "--k", "0", "--m", "1"]), {})
    assert cfg.precision_bits == 768 and cfg.cache_dir is None
