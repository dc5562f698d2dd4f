import json
import subprocess
import sys
from fractions import Fraction

import pytest

from sharpconst.cli import format_csv, main, parse_csv, parse_p


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_p_tokens():
    assert parse_p("inf") == float("inf")
    assert parse_p("2") == 2 and isinstance(parse_p("2"), int)
    assert parse_p("1.5") == Fraction(3, 2)
    assert parse_p("1.0000000000004") == 1  # below the 1e-12 resolution
    assert parse_p("3.1234567890123") == Fraction(3123456789012, 10 ** 12)


def test_envelope_csv(capsys):
    code, out, _ = run(capsys, "envelope", "--n", "3")
    assert code == 0
    assert out.splitlines() == ["a,A,B", "0.146446609,,0.146446609", "0.5,,0.207106781",
                                "0.853553391,,0.146446609"]


def test_profile_p1_all_half(capsys):
    code, out, _ = run(capsys, "profile", "--n", "1", "--k", "0", "--p", "1", "--grid", "5")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 5 and all(A == 0.5 for _, A, _ in rows)


def test_csv_round_trip_byte_identical(capsys):
    code, out, _ = run(capsys, "profile", "--n", "2", "--k", "1", "--p", "inf", "--grid", "7")
    assert code == 0
    assert "\r" not in out
    assert format_csv(parse_csv(out)) == out
    code, out, _ = run(capsys, "envelope", "--n", "5")
    assert format_csv(parse_csv(out)) == out


def test_profile_json_and_out_file(capsys, tmp_path):
    path = tmp_path / "p.json"
    code, out, _ = run(capsys, "profile", "--n", "2", "--k", "0", "--p", "2", "--grid", "3",
                       "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["schema"] == 1 and len(doc["rows"]) == 3 and doc["rows"][0]["B"] is None


def test_profile_single_point(capsys):
    code, out, _ = run(capsys, "profile", "--n", "1", "--k", "0", "--p", "2", "--a", "1/4")
    assert code == 0
    (row,) = parse_csv(out)
    assert row[1] == pytest.approx(0.4330127, abs=1e-7)


def test_lambda_json_example(capsys):
    code, out, _ = run(capsys, "lambda", "--n", "3", "--k", "2", "--p", "inf")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert {"n", "k", "p", "lambda", "argmax_a", "method"} <= set(doc)
    assert doc["lambda"] == pytest.approx(0.2071068, abs=1e-7)
    assert doc["argmax_a"] == pytest.approx(0.5, abs=1e-6)
    assert doc["p"] == "inf"


def test_kernel_dump(capsys):
    code, out, _ = run(capsys, "kernel", "--n", "2", "--k", "1", "--a", "1/3", "--nu", "0,1/2")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1 and doc["nu"] == [0.0, 0.5]
    assert {"g", "g_n", "S", "Q"} <= set(doc)


@pytest.mark.parametrize("argv,flag", [
    (["profile", "--n", "2", "--k", "5", "--p", "2"], "--k"),
    (["profile", "--n", "2", "--k", "1", "--p", "abc"], "--p"),
    (["profile", "--n", "2", "--k", "1", "--p", "0.5"], "--p"),
    (["profile", "--n", "2", "--k", "1", "--p", "2", "--grid", "2"], "--grid"),
    (["profile", "--n", "2", "--k", "1", "--p", "2", "--bogus", "1"], "--bogus"),
    (["profile", "--n", "2", "--p", "2"], "--k"),
    (["kernel", "--n", "2", "--k", "1", "--a", "1.5"], "--a"),
    (["kernel", "--n", "2", "--k", "1", "--a", "0.5", "--nu", "1"], "--nu"),
    (["lambda", "--n", "2", "--k", "1", "--p", "2", "--jobs", "0"], "--jobs"),
])
def test_usage_errors_name_the_flag(capsys, argv, flag):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert flag in err and out == ""


def test_nonconvergence_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("SHARPCONST_MAX_ITERS", "2")
    code, out, err = run(capsys, "profile", "--n", "3", "--k", "1", "--p", "3", "--a", "0.3")
    assert code == 2
    assert "NonConvergenceError" in err
    assert parse_csv(out)[0][1] != parse_csv(out)[0][1]  # NaN row


def test_bad_env_var(capsys, monkeypatch):
    monkeypatch.setenv("SHARPCONST_MAX_ITERS", "lots")
    code, _, err = run(capsys, "envelope", "--n", "2")
    assert code == 1 and "SHARPCONST_MAX_ITERS" in err


def test_verify_subset_deterministic(capsys):
    code1, out1, _ = run(capsys, "verify", "6", "--seed", "3")
    code2, out2, _ = run(capsys, "verify", "6", "--seed", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[1].startswith("6,PASS")


def test_verify_failure_exit_code(capsys):
    # the p = 2 series comparison cannot meet its tolerance at M = 400
    code, out, _ = run(capsys, "verify", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 3 and doc["passed"] is False


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sharpconst", "envelope", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == "a,A,B\n0.5,,0.5\n"
