import csv
import io
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from betaprod.cli import main
from betaprod.model import make_spec
from betaprod.series_unit import build_unit


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_pdf_uniform(capsys):
    code, out, _ = run(capsys, "pdf", "--u", "1", "--v", "2", "--grid", "0:1:5")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["x", "value", "region", "est_error"]
    assert [float(r["value"]) for r in table] == [1.0] * 5
    assert {r["region"] for r in table} <= {"origin", "unit", "m2closed", "m2log"}


def test_cdf_mms_small_range(capsys):
    code, out, _ = run(capsys, "cdf", "--family", "mms", "--grid", "0:0.04:41")
    assert code == 0
    values = [float(r["value"]) for r in rows(out)]
    assert len(values) == 41 and values[0] == 0.0
    assert np.all(np.diff(values) > 0)


def test_pdf_state_det(capsys):
    code, out, _ = run(capsys, "pdf", "--family", "state-det", "--alpha", "1", "--grid", "0.6:1:9")
    assert code == 0
    values = [float(r["value"]) for r in rows(out)]
    assert all(np.isfinite(values)) and all(v > 0 for v in values[:-1])
    assert values[-1] == 0.0


def test_output_is_byte_identical(capsys):
    args = ("pdf", "--family", "mms", "--grid", "0:1:33")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_seventeen_digits_round_trip(capsys):
    _, out, _ = run(capsys, "coeffs", "--family", "mms", "--n", "3")
    values = [float(r["c_n"]) for r in rows(out)]
    assert values == list(build_unit(make_spec([(0.25, 5 / 6), (0.5, 1), (0.75, 7 / 6)]), 3).coeffs)


def test_coeffs_mms(capsys):
    code, out, _ = run(capsys, "coeffs", "--family", "mms", "--n", "3")
    assert code == 0
    table = rows(out)
    assert [int(r["n"]) for r in table] == [0, 1, 2, 3]
    expected = [1, Fraction(221, 216), Fraction(156697, 155520), Fraction(232223093, 235146240)]
    assert [float(r["c_n"]) for r in table] == pytest.approx([float(e) for e in expected], rel=1e-12)


def test_coeffs_uniform(capsys):
    _, out, _ = run(capsys, "coeffs", "--u", "1", "--v", "2", "--n", "5")
    assert [float(r["c_n"]) for r in rows(out)] == [1, 0, 0, 0, 0, 0]


def test_coeffs_m2_by_hand(capsys):
    # two steps of the recurrence for u = (1/2, 1), v = (3/2, 2), delta = 2:
    # c_1 = R'_0(1) / (-2), c_2 = [R'_0(2) c_1 / (-3) + q(1) / (-3)] / 2
    _, out, _ = run(capsys, "coeffs", "--u", "0.5,1", "--v", "1.5,2", "--n", "2")
    u, v = (0.5, 1.0), (1.5, 2.0)

    def p(c):
        return (c + 1 - u[0]) * (c + 1 - u[1])

    def q(c):
        return (c + 2 - v[0]) * (c + 2 - v[1])

    def r0(g):
        return p(g) - ((1 + g) * q(g) - g * q(g - 1))

    c1 = r0(1) / -2
    c2 = (r0(2) * c1 / -3 + q(1) / -3) / 2
    assert [float(r["c_n"]) for r in rows(out)] == pytest.approx([1, c1, c2], rel=1e-14)


@pytest.mark.parametrize("family, tol", [
    (("--u", "1", "--v", "2", "--n", "4"), 1e-9),
    (("--family", "mms"), 1e-6),
    (("--family", "state-det", "--alpha", "0.3", "--n", "6"), 1e-6),
])
def test_moments(capsys, family, tol):
    code, out, _ = run(capsys, "moments", *family)
    assert code == 0
    assert all(float(r["abs_diff"]) < tol for r in rows(out))


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--u", "1", "--v", "2", "--samples", "20000")
    assert code == 0
    assert "FAIL" not in out and "all checks passed" in out


def test_verify_mms_million_samples(capsys):
    code, out, _ = run(capsys, "verify", "--family", "mms", "--samples", "1000000", "--seed", "7")
    assert code == 0, out


def test_verify_detects_corrupted_coefficient(capsys):
    code, out, _ = run(capsys, "verify", "--family", "mms", "--samples", "0", "--corrupt-coeff", "2")
    assert code == 1
    assert "FAIL" in out


@pytest.mark.parametrize("argv, name", [
    (("pdf", "--u", "1,2", "--v", "2"), "--u/--v"),
    (("pdf", "--u", "1", "--v", "0.5"), "--u/--v"),
    (("pdf", "--u", "1", "--v", "2", "--grid", "0:2:3"), "--grid"),
    (("pdf", "--u", "1", "--v", "2", "--grid", "0:1:1"), "--grid"),
    (("pdf", "--u", "1", "--v", "2", "--grid", "nonsense"), "--grid"),
    (("pdf", "--family", "state-det"), "--alpha"),
    (("pdf", "--family", "mms", "--crossover", "soon"), "--crossover"),
    (("pdf", "--family", "mms", "--crossover", "1.5"), "crossover"),
    (("pdf",), "--u"),
])
def test_validation_errors(capsys, argv, name):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert name in err and out == ""


def test_numerical_failure(capsys, monkeypatch):
    monkeypatch.setenv("BETAPROD_MAX_TERMS", "3")
    code, _, err = run(capsys, "pdf", "--family", "mms", "--grid", "0.1:0.5:3", "--n", "8")
    assert code == 3
    assert "numerical failure" in err


def test_unknown_command(capsys):
    assert run(capsys, "plot")[0] == 2


def test_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "figures", "--family", "mms", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig1_pdf.csv", "fig2_cdf.csv", "fig3_cdf.csv", "fig4_survival.csv"]
    cdf = [float(r["value"]) for r in rows((tmp_path / "fig2_cdf.csv").read_text())]
    assert cdf[-1] == pytest.approx(1.0, abs=1e-9)
    surv = rows((tmp_path / "fig4_survival.csv").read_text())
    assert float(surv[0]["x"]) == pytest.approx(0.4) and float(surv[-1]["value"]) == 0.0


def test_sample_to_file(tmp_path, capsys):
    target = tmp_path / "draws.txt"
    code, out, _ = run(capsys, "sample", "--family", "mms", "--samples", "10", "--seed", "3",
                       "--out", str(target))
    assert code == 0 and out == ""
    values = [float(s) for s in target.read_text().split()]
    assert len(values) == 10 and values == sorted(values)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "betaprod", "coeffs", "--u", "1", "--v", "2",
                           "--n", "1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "n,c_n\n0,1\n1,0\n"
