from __future__ import annotations

import json

import pytest

from enriques_phi.cli import main


def test_verify_denominator_exit_zero(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "denominator", "--order", "8", "--json", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data[0]["check_name"] == "denominator" and data[0]["pass"] is True
    assert "PASS" in capsys.readouterr().out


def test_verify_main_at_point():
    assert main(["verify", "main", "--tau", "2i", "--tau-prime", "3i", "--tol", "1e-6"]) == 0


def test_failing_tolerance_gives_exit_one():
    assert main(["verify", "even", "--tau", "3i", "--tau-prime", "4i", "--tol", "1e-40"]) == 1


def test_qexp_prints_level2_odd_leading_terms(capsys):
    assert main(["qexp", "phi", "--gamma", "0,0,1/2,1/2", "--order", "2"]) == 0
    text = capsys.readouterr().out
    assert "(-256)*Q^2" in text and "(512)*P*Q" in text and "(-256)*P^2" in text


def test_eval_functions(capsys):
    assert main(["eval", "j", "--at", "i"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["value"]["re"].startswith("1728.0") and float(obj["value"]["im"]) == 0
    assert main(["eval", "phi2", "--at", "2i,2i"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["vanishes"] is True and float(obj["value"]["re"]) == 0


def test_lattice_info(capsys):
    assert main(["lattice", "info", "--name", "appendix"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["signature"] == [2, 10]
    assert obj["two_elementary"] == {"rank": 10, "parity": 0}


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "j", "--at", "1-2i"],
        ["eval", "phi1", "--at", "2i,3i,4i"],
        ["qexp", "phi", "--gamma", "0,0,0,0"],
        ["verify", "main", "--tau", "2i"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_threads_keep_order(tmp_path, capsys):
    out = tmp_path / "even.json"
    assert main(["verify", "even", "--threads", "2", "--json", str(out)]) == 0
    names = [r["inputs"] for r in json.loads(out.read_text())]
    assert len(names) == 3
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) == 3 and all(l.startswith("PASS") for l in lines)
