import csv
import io
import json

import mpmath
import pytest
from click.testing import CliRunner

from klab import orthopoly
from klab.cli import COMPARE_HEADER, main
from klab.precision import PrecisionContext


@pytest.fixture
def runner():
    return CliRunner()


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_tc(runner):
    res = runner.invoke(main, ["--digits", "40", "tc"])
    assert res.exit_code == 0
    assert res.output.startswith("1.3254868386983")


def test_classify_json(runner):
    res = runner.invoke(main, ["--digits", "30", "classify", "--s=-2i"])
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["label"] == "G1Minus"
    assert out["s"] == {"re": "0.0", "im": "-2.0"}
    assert float(out["re_h_cr"]) < 0


def test_malformed_complex_is_usage_error(runner, tmp_path):
    target = tmp_path / "out.csv"
    res = runner.invoke(main, ["--out", str(target), "recurrence", "--s", "1+2", "--n-max", "3"])
    assert res.exit_code == 2
    assert not target.exists()


def test_low_digits_rejected(runner):
    assert runner.invoke(main, ["--digits", "10", "tc"]).exit_code == 2


def test_wrong_region_is_computation_error(runner, tmp_path):
    target = tmp_path / "out.csv"
    res = runner.invoke(main, ["--digits", "30", "--out", str(target), "compare", "--regime", "genus0", "--n-list", "10", "--s=-2i"])
    assert res.exit_code == 3
    assert "RegionMismatch" in res.output
    assert not target.exists()


def test_recurrence_at_real_s_approaches_limits(runner):
    res = runner.invoke(main, ["--digits", "30", "recurrence", "--s", "1", "--n-max", "50"])
    assert res.exit_code == 0
    rows = _rows(res.output)
    assert [int(r["n"]) for r in rows] == list(range(1, 51))
    first, last = rows[0], rows[-1]
    assert abs(float(last["alpha_re"])) < abs(float(first["alpha_re"]))
    assert abs(float(last["beta_re"]) - 0.25) < 0.01
    assert all(float(r["alpha_im"]) == 0 and float(r["beta_im"]) == 0 for r in rows)


def test_recurrence_values_match_library(runner):
    res = runner.invoke(main, ["--digits", "35", "recurrence", "--s", "0+1i", "--n-max", "12"])
    row = _rows(res.output)[-1]
    ctx = PrecisionContext(35)
    (e,) = orthopoly.diagonal_recurrence(1j, [12], ctx)
    with mpmath.workdps(45):
        got = mpmath.mpc(row["alpha_re"], row["alpha_im"])
        assert abs(got - e.alpha) < mpmath.mpf(10) ** -33 * max(1, abs(e.alpha))


def test_output_file_is_byte_identical(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        res = runner.invoke(main, ["--digits", "30", "--out", str(target), "zeros", "--s", "0.5-0.5i", "--n", "9"])
        assert res.exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(_rows(a.read_text())) == 9


def test_compare_genus0_errors_shrink(runner):
    res = runner.invoke(main, ["--digits", "30", "compare", "--regime", "genus0", "--n-list", "10,20,40", "--s", "0.5"])
    assert res.exit_code == 0
    rows = _rows(res.output)
    assert list(rows[0].keys()) == COMPARE_HEADER
    errs = [float(r["beta_abs_err"]) for r in rows]
    assert errs[0] > errs[1] > errs[2]
    # the error column is recomputable from the printed columns
    with mpmath.workdps(40):
        for r in rows:
            b = mpmath.mpc(r["beta_re"], r["beta_im"])
            bh = mpmath.mpc(r["beta_hat_re"], r["beta_hat_im"])
            assert abs(abs(b - bh) - mpmath.mpf(r["beta_abs_err"])) < mpmath.mpf(10) ** -28


def test_compare_requires_s(runner):
    assert runner.invoke(main, ["compare", "--regime", "genus1", "--n-list", "10"]).exit_code == 2


def test_compare_rejects_nonnegative_L2(runner):
    assert runner.invoke(main, ["compare", "--regime", "critical", "--n-list", "10", "--L2", "1"]).exit_code == 2


def test_digits_from_environment(runner):
    res = runner.invoke(main, ["tc"], env={"KLAB_DIGITS": "30"})
    assert res.exit_code == 0
    assert 28 <= len(res.output.strip().replace(".", "")) <= 31


def test_quad_json(runner):
    res = runner.invoke(main, ["--digits", "30", "quad", "--omega", "3", "--n", "8", "--f", "cos"])
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert set(out) >= {"value", "reference", "abs_err"}
    assert float(out["abs_err"]) < 1e-10


def test_pii_command(runner):
    res = runner.invoke(main, ["pii", "--nodes", "400"])
    assert res.exit_code == 0
    rows = _rows(res.output)
    assert len(rows) == 400 and list(rows[0]) == ["x", "q", "qprime", "D"]
