import json
import subprocess
import sys
from pathlib import Path

import pytest

from k3mds.classify import KondoList, family_verdict
from k3mds.cli import main, render, run
from k3mds.discriminant import discriminant_form
from k3mds.lattice import parse_spec
from k3mds.represent import ConstraintSystem, represents

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data" / "kondo-r9plus"


def payload(argv):
    rep = run(argv + ["--json"])
    return rep, json.loads(render(rep, True))


def test_table1_exit_zero():
    rep, out = payload(["table1", "--kondo", str(DATA)])
    assert rep.exit_code == 0
    assert out["result"]["row_count"] == 20
    assert out["schema"] == 1


def test_table1_mismatch_is_nonzero(tmp_path):
    text = DATA.read_text().replace("13 U+E8+A3\n", "")
    f = tmp_path / "kondo"
    f.write_text(text)
    rep = run(["table1", "--kondo", str(f)])
    assert rep.exit_code == 1


def test_table1_single_rank():
    rep, out = payload(["table1", "--rho", "15"])
    assert rep.exit_code == 0 and out["result"]["row_count"] == 2


def test_missing_data_file():
    assert run(["table1", "--kondo", "/nonexistent/kondo"]).exit_code == 3
    assert run(["classify", "U+E8^2", "--kondo", "/nonexistent/kondo"]).exit_code == 3


@pytest.mark.parametrize("argv", [[], ["bogus"], ["lattice", "U+X"], ["family"],
                                  ["family", "--sd", "2", "--qd", "2"],
                                  ["complement", "U", "--vectors", "1,a"],
                                  ["represents", "U", "--target", "-2", "--dot", "zz=1"],
                                  ["represents", "U", "--target", "-3"]])
def test_usage_errors(argv):
    assert run(argv).exit_code == 2


def test_family_matches_library():
    rep, out = payload(["family", "--sd", "12"])
    lib = family_verdict(12, "Sd")
    assert out["result"]["verdict"] == lib.verdict == "not-admissible"
    assert out["result"]["bx"]["text"] == lib.bx.describe()


def test_lattice_disc_e8_2():
    rep = run(["lattice", "U+E8(2)", "--disc"])
    text = render(rep, False)
    assert "(Z/2)^8" in text and "integral q" in text
    _, out = payload(["lattice", "U+E8(2)", "--disc"])
    f = discriminant_form(parse_spec("U+E8(2)"))
    assert out["result"]["discriminant"]["invariant_factors"] == list(f.invariant_factors)
    assert out["result"]["discriminant"]["integral_q"] is True


def test_represents_matches_library():
    _, out = payload(["represents", "<4>+<-2>", "--target", "-6"])
    lib = represents(parse_spec("<4>+<-2>"), ConstraintSystem.build(-6))
    assert out["result"]["verdict"]["text"] == lib.describe() == "ObstructedMod(9)"
    _, out = payload(["represents", "U+A1", "--target", "-2", "--dot", "A1=1"])
    # v·a = 1 is impossible when a² = −2 generates the A1 summand
    assert out["result"]["verdict"]["kind"] == "NoneExhaustive"
    _, out = payload(["represents", "U+A1", "--target", "-2", "--dot", "1,0,0=1",
                      "--moduli", "2", "3", "--bound", "5"])
    assert out["result"]["verdict"]["kind"] == "Witness"


def test_complement_with_rationals():
    _, out = payload(["complement", "A1^2", "--vectors", "1/2,1/2"])
    assert out["result"]["basis"] in ([[1, -1]], [[-1, 1]])
    _, out = payload(["complement", "U+A1", "--vectors", "1,0,0;0,0,1"])
    assert out["result"]["degenerate"] is True


def test_overlattices_and_classify():
    _, out = payload(["overlattices", "<4>+<-2>+<-2>", "--index", "2"])
    assert len(out["result"]["classes"]) == 1
    _, out = payload(["classify", "U+E8^2"])
    assert out["result"]["admissible_count"] == 0


def test_isometry_command():
    _, out = payload(["isometry", "<4>+<-2>+<-2>", "--matrix", "3,2,0;-4,-3,0;0,0,1",
                      "--restrict", "1,0,0;0,1,0"])
    assert out["result"]["order"] == 2
    assert out["result"]["restriction"] == [[3, 2], [-4, -3]]
    _, out = payload(["isometry", "<4>+<-2>+<-2>", "--matrix", "9,2,6;-12,-3,-8;-4,0,-3"])
    assert out["result"]["order"] == "infinite"


def test_strict_inconclusive():
    assert run(["family", "--qd", "4"]).exit_code == 0
    assert run(["family", "--qd", "4", "--strict"]).exit_code == 4


def test_deterministic_output():
    argv = ["table1", "--json"]
    a = render(run(argv), True)
    b = render(run(argv), True)
    assert a == b


def test_main_prints(capsys):
    assert main(["lattice", "E8"]) == 0
    assert "det 1" in capsys.readouterr().out


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "k3mds.cli", "family", "--sd", "4", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["verdict"] == "admissible"


def test_bundled_default_equals_file():
    assert KondoList.bundled().entries == KondoList.load(DATA).entries
