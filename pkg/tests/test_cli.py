import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from compound_tails.cli import main, render_expansion_json
from compound_tails.tails import SummandSpec, TailExpansion, evaluate_expansion, expansion
from compound_tails.compound import Poisson


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


POISSON_K3 = "a - a^2*mu1*D + a^2*(a*mu1^2 + mu2)/2*D^2 - a^2*(a^2*mu1^3 + 3*a*mu1*mu2 + mu3)/6*D^3\n"
GEOMETRIC_K3 = "b - 2*b^2*mu1*D + b^2*(3*b*mu1^2 + mu2)*D^2 - b^2*(12*b^2*mu1^3 + 9*b*mu1*mu2 + mu3)/3*D^3\n"


def test_character_symbolic_goldens(capsys):
    assert run(capsys, "character", "--count", "poisson", "--order", "3")[:2] == (0, POISSON_K3)
    assert run(capsys, "character", "--count", "geometric", "--order", "3")[:2] == (0, GEOMETRIC_K3)


def test_character_trivial(capsys):
    assert run(capsys, "character", "--count", "degenerate", "--param", "1", "--order", "3")[:2] == (0, "1\n")
    assert run(capsys, "character", "--count", "geometric", "--order", "0")[:2] == (0, "b\n")


def test_character_numeric_moments(capsys):
    code, out, _ = run(capsys, "character", "--alpha", "1/3", "--count", "poisson", "--order", "2")
    assert code == 0
    assert out == "a - 6*a^2*D + (360*a^2 + 18*a^3)*D^2\n"
    code, out, _ = run(capsys, "character", "--alpha", "1/3", "--count", "poisson", "--param", "1/2", "--order", "1", "--format", "json")
    assert json.loads(out)["coeffs"] == ["1/2", "-3/2"]


def test_expand_poisson_json(capsys):
    code, out, _ = run(capsys, "expand", "--alpha", "1/3", "--count", "poisson", "--order", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert [t["r"] for t in doc["terms"]] == ["0", "-2/3", "-4/3", "-5/3", "-2", "-7/3", "-8/3"]
    assert doc["terms"][2]["coeff"] == "40*a^2 + 2*a^3"
    assert doc["param_symbol"] == "a"


def test_expand_degenerate_single_record(capsys):
    _, out, _ = run(capsys, "expand", "--alpha", "1/3", "--count", "degenerate", "--param", "1", "--format", "json")
    assert json.loads(out)["terms"] == [{"coeff": "1", "r": "0"}]


@pytest.mark.parametrize("count", ["poisson", "geometric"])
def test_json_roundtrip_byte_identical(capsys, count):
    _, out, _ = run(capsys, "expand", "--alpha", "1/3", "--count", count, "--order", "4", "--format", "json")
    again = render_expansion_json(TailExpansion.from_json_obj(json.loads(out)))
    assert again == out
    assert out.endswith("\n") and not out.endswith("\n\n")


def test_expand_eval_composition(capsys, tmp_path):
    _, out, _ = run(capsys, "expand", "--alpha", "1/3", "--count", "poisson", "--order", "4", "--format", "json")
    path = tmp_path / "E.json"
    path.write_text(out, encoding="utf-8")
    code, got, _ = run(capsys, "eval", "--input", str(path), "--t", "500,1000", "--param", "1/2", "--format", "json")
    assert code == 0
    direct = expansion(SummandSpec(Fraction(1, 3)), Poisson(), 4)
    for row in json.loads(got):
        assert row["value"] == pytest.approx(evaluate_expansion(direct, row["t"], Fraction(1, 2)), rel=1e-15)


def test_expand_eval_pipe():
    cmd = [sys.executable, "-m", "compound_tails"]
    expand = subprocess.run(
        cmd + ["expand", "--alpha", "1/3", "--count", "degenerate", "--param", "1", "--format", "json"],
        capture_output=True, text=True, check=True,
    )
    ev = subprocess.run(cmd + ["eval", "--t", "1000"], input=expand.stdout, capture_output=True, text=True, check=True)
    t, value = ev.stdout.split()
    assert float(value) == pytest.approx(4.539992976248485e-05, rel=1e-15)


def test_eval_missing_param(capsys, tmp_path):
    _, out, _ = run(capsys, "expand", "--alpha", "1/3", "--count", "geometric", "--order", "1", "--format", "json")
    path = tmp_path / "E.json"
    path.write_text(out, encoding="utf-8")
    code, _, err = run(capsys, "eval", "--input", str(path), "--t", "100")
    assert code == 2
    assert "param" in err


def test_invalid_alpha_exit_code(capsys):
    code, _, err = run(capsys, "expand", "--alpha", "5/3", "--count", "poisson")
    assert code == 2
    assert "hazard_to_zero" in err and "summand.alpha" in err
    code, out, err = run(capsys, "validate", "--alpha", "5/3")
    assert code == 2
    assert "FAIL hazard_to_zero" in out


def test_unsupported_exit_codes(capsys):
    assert run(capsys, "expand", "--alpha", "2/5", "--count", "poisson")[0] == 3
    code, _, err = run(capsys, "verify", "--alpha", "1/3", "--count", "poisson", "--t", "100")
    assert code == 3
    assert "count.param" in err


def test_bad_count_names_field(capsys):
    code, _, err = run(capsys, "expand", "--alpha", "1/3", "--count", "custom", "--pmf", "1:1/2,2:1/3")
    assert code == 2
    assert "count.pmf" in err
    code, _, err = run(capsys, "expand", "--alpha", "1/3", "--count", "geometric", "--param", "2")
    assert code == 2
    assert "count.param" in err


def test_verify_degenerate(capsys):
    code, out, _ = run(capsys, "verify", "--alpha", "1/3", "--count", "degenerate", "--param", "1", "--order", "3", "--t", "100,1000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    for r in rows:
        width = float(r["upper"]) - float(r["lower"])
        assert abs(float(r["abs_resid_lo"])) <= width and abs(float(r["abs_resid_hi"])) <= width


def test_verify_poisson(capsys):
    code, out, _ = run(
        capsys, "verify", "--alpha", "1/3", "--count", "poisson", "--param", "1/2", "--order", "4",
        "--t", "500,1000,2000", "--delta", "0.1", "--format", "json",
    )
    assert code == 0
    rows = [r for r in json.loads(out) if r["t"] == 2000.0]
    resid = [max(abs(r["abs_resid_lo"]), abs(r["abs_resid_hi"])) for r in rows[:3]]
    assert resid[0] > resid[1] > resid[2]
    # (G - a Fbar) is positive: the omitted terms are positive
    assert rows[0]["abs_resid_lo"] > 0


def test_verify_custom_pmf(capsys):
    code, out, _ = run(capsys, "verify", "--alpha", "1/3", "--count", "custom", "--pmf", "1:1/2,2:1/2", "--order", "2", "--t", "2000")
    assert code == 0
    assert out.startswith("t,j,partial_sum")


def test_spec_file(capsys, tmp_path):
    job = {
        "summand": {"alpha": "1/3"},
        "count": {"kind": "poisson", "param": "1/2"},
        "order": 2,
        "t_grid": [1000.0],
        "delta": 0.1,
        "output": "csv",
    }
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job), encoding="utf-8")
    code, out, _ = run(capsys, "verify", "--spec", str(path))
    assert code == 0
    assert len(out.strip().splitlines()) == 4
    # flags override the file
    code, out, _ = run(capsys, "expand", "--spec", str(path), "--order", "0", "--format", "text")
    assert out == "1/2 * t^(0) * exp(-t^(1/3))\n"


def test_missing_spec_file(capsys, tmp_path):
    code, _, err = run(capsys, "expand", "--spec", str(tmp_path / "nope.json"))
    assert code == 2
