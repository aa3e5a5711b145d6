import json
import subprocess
import sys

import pytest

from cmtorus.cli import SCHEMA, SUITES, main, run_suite


def run_json(capsys, *argv):
    code = main(["--json", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_datum_cyclotomic(capsys):
    code, rep = run_json(capsys, "datum", "--cyclotomic", "13", "--p", "3")
    assert code == 0 and rep["schema"] == SCHEMA
    assert rep["outputs"]["places"] == {"X": 4, "Y": 2, "iota_in_D": False}


def test_datum_quadratic_split(capsys):
    code, rep = run_json(capsys, "datum", "--quadratic", "-1", "--p", "5")
    assert code == 0
    assert rep["outputs"]["places"]["X"] == 2 and not rep["outputs"]["places"]["iota_in_D"]


def test_datum_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["datum", "--cyclotomic", "2"])
    assert exc.value.code == 2


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no-such-suite"])
    assert exc.value.code == 2


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_every_suite_passes(suite):
    rep = run_suite(suite)
    assert rep["pass"], {k: v for k, v in rep["results"].items() if not v["pass"]}


def test_weil_sequence_all_presets(capsys):
    code, rep = run_json(capsys, "verify", "weil-sequence", "--all-presets")
    assert code == 0 and rep["pass"]
    assert len(rep["outputs"]) == 18


def test_hasse_parity_table(capsys):
    code, rep = run_json(capsys, "verify", "hasse-parity", "--all-presets")
    assert code == 0
    out = rep["outputs"]
    assert out["Q(zeta15) 19"]["cokernel"] == "Z/2"
    assert out["Q(zeta13) 3"]["cokernel"] == "0"
    assert out["Q(i) 5"]["cokernel"] == "0"


def test_symbolic_limit_rows(capsys):
    code, rep = run_json(capsys, "verify", "symbolic-limits")
    out = rep["outputs"]
    assert code == 0
    assert (out["(Z/6, m)"]["lim"], out["(Z/6, m)"]["lim1"]) == ("0", "0")
    assert (out["(Z, m)"]["lim"], out["(Z, m)"]["lim1"]) == ("0", "Zhat/Z")
    assert (out["(Q/Z, m)"]["lim"], out["(Q/Z, m)"]["lim1"]) == ("A_f", "0")


def test_classfield(capsys):
    code, rep = run_json(capsys, "classfield", "--hminus", "23", "--irregular", "150",
                         "--forms", "-20")
    out = rep["outputs"]
    assert code == 0
    assert out["hminus 23"]["hminus"] == 3
    assert out["irregular 150"]["count"] == 7
    assert out["forms -20"]["group"] == "Z/2"


def test_classfield_cap_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["classfield", "--hminus", "211"])
    assert exc.value.code == 2


def test_json_flag_after_subcommand(capsys):
    assert main(["classfield", "--forms", "-23", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["outputs"]["forms -23"]["order"] == 3


def test_human_output(capsys):
    assert main(["verify", "crossed"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "PASS"
    assert all(line.startswith("PASS ") for line in lines[:-1])


def test_reports_are_deterministic(capsys):
    _, a = run_json(capsys, "verify", "transition-vanishing")
    _, b = run_json(capsys, "verify", "transition-vanishing")
    assert a == b


def test_parallel_matches_serial():
    assert run_suite("rho", True, parallel=True) == run_suite("rho", True)


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "cmtorus", "--json", "classfield", "--forms", "-4"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["outputs"]["forms -4"]["order"] == 1
