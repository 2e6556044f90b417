"""CLI surface: formats, exit codes, determinism."""

import csv
import io
import json

import pytest

from loopdens.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run_cli(argv):
    import contextlib

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_density_exact_single():
    code, out = run_cli(["density", "--l", "4", "--mode", "exact"])
    assert code == EXIT_OK
    assert "17/160" in out and "11/320" in out


def test_density_odd_l_exits_2():
    code, _ = run_cli(["density", "--l", "3"])
    assert code == EXIT_USAGE


def test_density_csv_range():
    code, out = run_cli(["density", "--l-range", "2:12", "--format", "csv"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:5] == ["L", "nu_c_num", "nu_c_den", "nu_nc_num", "nu_nc_den"]
    assert len(rows) == 1 + 6  # header + even L in 2..12
    assert rows[2][:5] == ["4", "17", "160", "11", "320"]


def test_density_json_roundtrip():
    code, out = run_cli(["density", "--l", "6", "--format", "json"])
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload[0]["nu_c"] == {"num": 913, "den": 8960}
    assert payload[0]["nu_nc"] == {"num": 421, "den": 26880}


def test_verify_all_small():
    code, out = run_cli(["verify", "all", "--n-max", "2"])
    assert code == EXIT_OK
    assert "all" in out and "passed" in out


def test_verify_report_shape():
    code, out = run_cli(["verify", "tq", "--n-max", "3", "--format", "json"])
    assert code == EXIT_OK
    rows = json.loads(out)
    identities = {r["identity"] for r in rows}
    assert len(rows) == len(identities) * 3
    assert all(r["status"] == "pass" for r in rows)


def test_verify_kummer():
    code, out = run_cli(["verify", "kummer", "--n-max", "4"])
    assert code == EXIT_OK


def test_oracle_match_and_guard(tmp_path):
    code, out = run_cli(["oracle", "--l", "2"])
    assert code == EXIT_OK and "EXACT-MATCH" in out and "1/8" in out
    code, _ = run_cli(["oracle", "--l", "10"])
    assert code == EXIT_USAGE
    dump = tmp_path / "tm.json"
    code, out = run_cli(["oracle", "--l", "4", "--dump-matrix", str(dump)])
    assert code == EXIT_OK
    payload = json.loads(dump.read_text())
    assert payload["L"] == 4 and len(payload["states"]) == 6


def test_oracle_l6():
    code, out = run_cli(["oracle", "--l", "6"])
    assert code == EXIT_OK
    assert "913/8960" in out and "421/26880" in out and "EXACT-MATCH" in out


def test_simulate_small_and_deterministic():
    argv = ["simulate", "--l", "2", "--height", "2000", "--seed", "7", "--replicas", "4"]
    code1, out1 = run_cli(argv)
    code2, out2 = run_cli(argv)
    assert out1 == out2
    assert code1 == code2 == EXIT_OK
    payload = json.loads(out1)
    assert payload["replicas"] == 4
    assert abs(payload["z_nu_c"]) < 4


def test_simulate_height_guard():
    code, _ = run_cli(["simulate", "--l", "4", "--height", "10"])
    assert code == EXIT_USAGE


def test_asymptote_stream():
    code, out = run_cli(["asymptote", "--l-range", "2:40", "--order", "0"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["L", "quantity", "exact", "series", "residual", "residual_scaled"]
    data = rows[1:]
    assert len(data) == 2 * 20
    for row in data:
        assert all(abs(float(v)) < 1e9 for v in row[2:])
    # scaled nu_c residual approaches 1/(4 sqrt(3)) ~ 0.1443
    last_nu_c = [r for r in data if r[1] == "nu_c"][-1]
    assert abs(float(last_nu_c[5]) - 0.14433756) < 0.01


def test_asymptote_l2_present_and_finite():
    code, out = run_cli(["asymptote", "--l", "2", "--order", "2"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 3
