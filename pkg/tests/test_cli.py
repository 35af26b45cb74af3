import json

import pytest

from negmoment.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeff_one(capsys):
    assert call(capsys, "coeff", "--rep", "delta", "--n", "1")[:2] == (0, "1\n")


def test_usage_errors(capsys):
    assert call(capsys, "nonsense")[0] == 2
    assert call(capsys, "coeff", "--n", "abc")[0] == 2
    assert call(capsys, "coeff", "--n", "1.5")[0] == 2
    assert call(capsys, "coeff", "--n", "3", "--bogus", "1")[0] == 2
    assert call(capsys, "verify-cech", "--n", "9")[0] == 2
    assert call(capsys, "coeff", "--n", "0")[0] == 2


def test_verify_gauss_small(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = call(capsys, "verify-gauss", "--nmax", "21", "--qmax", "30", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,q,re_direct,im_direct,closed,abs_err"
    assert len(lines) == 1 + 11 * 30


def test_verify_gauss_fails_on_impossible_tolerance(capsys):
    assert call(capsys, "verify-gauss", "--nmax", "45", "--qmax", "20", "--tol", "0")[0] == 1


def test_verify_fe_rows(capsys):
    code, out, _ = call(capsys, "verify-fe", "--d", "5,-4", "--s", "2,0.25+1j")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split(",")[0] == "case_id" and len(lines) == 5
    assert all(l.endswith(",true") for l in lines[1:])


def test_verify_gauss_series_flags(capsys):
    code, out, _ = call(capsys, "verify-cech", "--n", "5", "--s", "-1", "--q", "1e5")
    assert code == 0 and out.splitlines()[1].startswith("gfe_n5_s0,5,")


def test_euler_product_json(capsys):
    code, out, _ = call(capsys, "euler-product", "--z", "20", "--pmax", "1e3",
                        "--format", "json")
    assert code == 0 and json.loads(out)[0]["value"] == pytest.approx(0.5)


def test_moment_reruns_identical(capsys):
    args = ("moment", "--alpha", "1.5", "--x", "2000", "--k", "500", "--format", "json")
    a = call(capsys, *args, "--workers", "1")
    b = call(capsys, *args, "--workers", "3")
    c = call(capsys, *args, "--workers", "1")
    assert a[1] == b[1] == c[1]
    assert a[0] == 0
    doc = json.loads(a[1])
    assert doc["rows"][0]["ratio"] == pytest.approx(1.0, abs=0.01)


def test_sweep_csv(capsys):
    code, out, _ = call(capsys, "sweep", "--alpha", "1.5", "--x-list", "1e3,2e3,4e3",
                        "--k", "500", "--format", "csv")
    assert out.splitlines()[0] == "X,lhs,main,ratio,trunc_est"
    assert len(out.splitlines()) == 4 and code in (0, 1)


def test_workers_env(monkeypatch, capsys):
    monkeypatch.setenv("NEGMOMENT_WORKERS", "2")
    from negmoment.lfunc import default_workers

    assert default_workers() == 2
