import csv
import io
import json
import subprocess
import sys

import pytest

from polarineq.cli import load_polynomial, main
from polarineq.inequalities import reports_from_csv
from polarineq.poly import Polynomial


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_counterexample_json(capsys):
    code, out, err = run(capsys, "counterexample", "--n", "2", "--beta", "1")
    d = json.loads(out)
    assert code == 0
    assert d["lhs_sq_over_2pi"] == 32 and d["rhs_sq_over_2pi"] == 24 and d["violates"] is True
    assert "threshold" in err


def test_counterexample_fraction_and_table(capsys):
    code, out, _ = run(capsys, "counterexample", "--n", "4", "--beta", "21/20",
                       "--format", "table")
    assert code == 0 and "naive bound violated" in out


def test_counterexample_bad_input(capsys):
    assert run(capsys, "counterexample", "--n", "1")[0] == 2
    assert run(capsys, "counterexample", "--n", "3", "--beta", "abc")[0] == 2


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--p", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["C_p"] == pytest.approx(0.707106781186, abs=1e-12)
    code, out, _ = run(capsys, "constants", "--p", "2")
    assert "0.707106781187" in out


def test_verify_contract_case(capsys, tmp_path):
    path = tmp_path / "v.csv"
    code, _, err = run(capsys, "verify", "--family", "nonvanishing", "--ids", "thm2,lemma1",
                       "--trials", "100", "--seed", "7", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 200
    assert {r["id"] for r in rows} == {"THM2", "LEMMA1_PW"}
    assert "THM2" in err
    assert len(reports_from_csv(path.read_text())) == 200


def test_verify_is_byte_reproducible(capsys):
    argv = ["verify", "--family", "unrestricted", "--degree", "2-6", "--ids", "thm1,zygmund",
            "--p", "1,3", "--trials", "10", "--seed", "3"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a.count("\n") == 1 + 10 * 4


def test_verify_conj4_expected_fail_exit_zero(capsys):
    code, out, err = run(capsys, "verify", "--family", "counterex", "--degree", "2-8",
                         "--ids", "conj4", "--alpha", "0,1", "--trials", "5", "--seed", "1")
    assert code == 0
    assert "expected-fail" in err
    assert all(r.passed is False for r in reports_from_csv(out))


def test_verify_requires_seed(capsys):
    assert run(capsys, "verify", "--family", "unrestricted", "--ids", "thm1")[0] == 2


def test_verify_unknown_id(capsys):
    assert run(capsys, "verify", "--family", "unrestricted", "--ids", "nope",
               "--seed", "1")[0] == 2


def test_verify_hypothesis_violation_is_usage_error(capsys):
    code = run(capsys, "verify", "--family", "unrestricted", "--degree", "3", "--ids", "thm2",
               "--trials", "5", "--seed", "1")[0]
    assert code == 2


def test_verify_force_hypothesis_may_fail(capsys):
    code = run(capsys, "verify", "--family", "unrestricted", "--degree", "2-8", "--ids",
               "erdos_lax", "--trials", "40", "--seed", "1", "--force-hypothesis")[0]
    assert code == 1


def test_verify_json_format(capsys):
    code, out, _ = run(capsys, "verify", "--family", "self-inversive", "--degree", "4",
                       "--ids", "thm3", "--trials", "3", "--seed", "2", "--alpha", "0,0",
                       "--format", "json")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and len(lines) == 3 and lines[0]["alpha"] == [0.0, 0.0]


def test_norms_from_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"declared_degree": 1, "coeffs": [[1, 0], [0, -1]]}')
    code, out, _ = run(capsys, "norms", "--poly", str(f), "--p", "2", "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert d["lp"][0]["value"] == pytest.approx((4 * 3.141592653589793) ** 0.5, rel=1e-13)
    assert d["sup"] == pytest.approx(2, rel=1e-12)


def test_malformed_json_reports_position(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"declared_degree": 1,\n "coeffs": [[1, 0], [0, ]]}')
    code, _, err = run(capsys, "norms", "--poly", str(f))
    assert code == 2 and ":2:" in err


def test_schema_errors_exit_two(capsys, tmp_path):
    f = tmp_path / "long.json"
    f.write_text('{"declared_degree": 1, "coeffs": [[1,0],[2,0],[3,0]]}')
    assert run(capsys, "norms", "--poly", str(f))[0] == 2
    assert run(capsys, "norms", "--poly", str(tmp_path / "missing.json"))[0] == 2


def test_load_polynomial_keeps_declared_degree(tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"declared_degree": 3, "coeffs": [[1, 0], [2, 0]]}')
    P = load_polynomial(f)
    assert P.degree == 3 and P == Polynomial([1, 2], 3)


def test_search_outputs(capsys, tmp_path):
    prefix = tmp_path / "best"
    code, _, _ = run(capsys, "search", "--inequality", "zygmund", "--degree", "3", "--p", "2",
                     "--restarts", "2", "--max-iter", "200", "--seed", "0",
                     "--out", str(prefix))
    assert code == 0
    best = json.loads((tmp_path / "best.json").read_text())
    assert best["ratio"] <= 1 + 1e-6 and best["polynomial"]["declared_degree"] == 3
    assert (tmp_path / "best.trace.csv").read_text().startswith("restart,")


def test_search_needs_seed(capsys):
    assert run(capsys, "search", "--inequality", "zygmund", "--degree", "3", "--p", "2")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "constants", "--p", "0.5")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "polarineq", "counterexample", "--n", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["lhs_sq_over_2pi"] == 216
