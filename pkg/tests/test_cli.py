import subprocess
import sys

import pytest

from minskylab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    fields = {}
    for line in out.splitlines():
        if ": " in line:
            k, v = line.split(": ", 1)
            fields.setdefault(k, v)
    return code, fields, out, err


def test_run_halts(capsys):
    code, f, _, _ = run(capsys, "run", "exa", "--config", "1;2,0")
    assert code == 0 and f["outcome"] == "Halted" and f["final"] == "(0;0,0)"


def test_run_out_of_fuel(capsys):
    code, f, _, _ = run(capsys, "run", "exa", "--config", "1;1,0", "--fuel", "50")
    assert code == cli.NO_FUEL and f["outcome"] == "OutOfFuel"


def test_missing_machine_is_usage_error(capsys):
    code, _, _, err = run(capsys, "run", "nope", "--config", "1")
    assert code == cli.USAGE and "no machine file" in err


def test_syntax_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.mm"
    bad.write_text("machine bad glasses=2\n1: frob g1 goto 0\n")
    code, _, _, err = run(capsys, "parse", str(bad))
    assert code == cli.USAGE and "line 2" in err


def test_decide_verdicts(capsys):
    code, f, _, _ = run(capsys, "decide", "S2R", "exa", "--u", "w(1;2,0)", "--v", "0")
    assert code == 0 and f["verdict"] == "Equal" and f["replay_ok"] == "True"
    code, f, _, _ = run(capsys, "decide", "S2R", "exc", "--u", "w(1;1,0)", "--v", "0")
    assert code == 0 and f["verdict"] == "Distinct"
    code, f, _, _ = run(capsys, "decide", "S2R", "exa", "--u", "w(1;1,0)", "--v", "0", "--fuel", "20")
    assert code == cli.NO_FUEL and f["verdict"] == "Unknown"


def test_variant_aliases(capsys):
    a = run(capsys, "emit", "s1p", "exc")
    b = run(capsys, "emit", "S1'", "exc")
    assert a[0] == b[0] == 0
    assert a[1]["presentation"] == b[1]["presentation"]


def test_conway_run(capsys):
    code, f, _, _ = run(capsys, "conway-run", "exa", "--n", "28")
    assert code == 0 and f["trajectory"] == "28 22 7 5 1" and f["s"] == "4"


def test_conway_literal_sub2_fails(capsys, tmp_path):
    m = tmp_path / "s.mm"
    m.write_text("machine s glasses=2\n1: if g2>0 dec g2 goto 0\n")
    code, f, _, _ = run(capsys, "conway-run", str(m), "--config", "1;1,0", "--literal-sub2")
    assert code == cli.FAILED and "error" in f


def test_not_associative_table(capsys, tmp_path):
    t = tmp_path / "t.txt"
    t.write_text("a b\nb a\na a\n")
    code, f, _, _ = run(capsys, "identity-eval", "--semigroup", str(t), "--identity", "xy=yx")
    assert code == cli.FAILED


def test_budget_exceeded(capsys):
    code, _, _, _ = run(capsys, "quotient", "S1'", "exc", "--word", "C A1 q1 A2",
                        "--identity", "x1 x2 x3 x4 x5 x6 = x6 x5 x4 x3 x2 x1")
    assert code == cli.NO_FUEL


def test_quotient_ex_c(capsys, tmp_path):
    out = tmp_path / "q.tab"
    code, f, _, _ = run(capsys, "quotient", "S1'", "exc", "--word", "C A1 q1 A2",
                        "--identity", "x^2y^2=y^2x^2", "--quasi", "1;0,0", "-o", str(out))
    assert code == 0 and out.exists()
    assert f["order"] == "19"


def test_zimin_and_isoterm(capsys):
    code, f, _, _ = run(capsys, "zimin", "3")
    assert code == 0 and f["length"] == "7"
    code, f, _, _ = run(capsys, "isoterm", "--word", "ababbab", "--identity", "x^3=x^4")
    assert f["isoterm"] == "True"


def test_rees_matrix_and_split(capsys):
    code, f, _, _ = run(capsys, "rees-matrix", "--group", "Z2", "--P", "1,g;g,1")
    assert code == 0 and f["zero_simple"] == "True"
    code, f, _, _ = run(capsys, "split-system", "--max-base", "2", "--bound", "3")
    assert code == 0


def test_byte_identical_output():
    argv = [sys.executable, "-m", "minskylab.cli", "decide", "AMALGAM", "exa",
            "--u", "w(1;2,0)", "--v", "0", "--strategy", "random", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, text=True)
    b = subprocess.run(argv, capture_output=True, text=True)
    assert a.returncode == b.returncode
    assert a.stdout == b.stdout and "seed: 3" in a.stdout


def test_every_subcommand_has_help():
    ap = cli.build_parser()
    sub = next(a for a in ap._actions if a.dest == "cmd")
    for name, sp in sub.choices.items():
        assert "--seed" in sp.format_help(), name
