import io
import json
import subprocess
import sys

import pytest

from peria.cli import COMMANDS, run_command

from conftest import CORPUS


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def results(*argv):
    code, out, err = run(*argv, "--json")
    assert code == 0, err
    return json.loads(out)["results"]


def test_classify_group_example():
    r = results("classify-group", str(CORPUS / "ex-periagroup.peria"))
    assert r["verdicts"] == {"finite": "no", "contracting": "yes", "acylhyp": "yes"}


def test_normal_form_example():
    assert results("nf", "dinf.peria", "x1 x2 x1 x1")["normal_form"] == "x1 x2"


def test_graph_check_example():
    r = results("graph-check", "cycle6.graph")
    assert r["mediangle"] and not r["quasimedian"]


def test_report_envelope_and_certification():
    code, out, _ = run("conj-growth", "z", "--max-n", "5", "--slack", "2")
    rep = json.loads(out)
    assert list(rep) == ["command", "inputs", "results", "certification", "warnings"]
    assert rep["certification"] == {"max_n": 5, "method": "saturation", "slack": 2}
    assert rep["results"]["series"] == "1,2,2,2,2,2"


@pytest.mark.parametrize("argv", [
    ("check", "ex-periagroup"),
    ("eq", "i2_3", "s t s", "t s t"),
    ("len", "ex-periagroup-z6", "v4^3 v1"),
    ("ball", "i2_5", "--radius", "6", "--tsv"),
    ("hyperplanes", "c4_racg", "--radius", "2"),
    ("classify-element", "pentagon_racg", "a b c d e"),
    ("morse", "z_x_z2", "a^3 b"),
    ("conj-growth", "f2", "--max-n", "5", "--method", "exact-gp", "--alpha", "3", "--verdict"),
    ("growth", "z2", "--max-n", "5"),
    ("series-product", "1,2,2,2", "1,2,2,2"),
    ("series-product", "z2_x_z3", "z2_x_z3", "--max-n", "3"),
    ("qm-closure", "wheel.graph"),
    ("quasi-cubulate", "square.parts"),
    ("contraction-profile", "f2", "a b", "--radius", "3"),
    ("skewer-witness", "f2", "a b", "--radius", "3"),
    ("coxeter-classify", "h4.cox"),
    ("coxeter-classify", "affine_a2"),
    ("omega", "mixed_s3_z3"),
    ("centraliser-rot", "ex-periagroup"),
    ("disjoint-cosets", "i2_3", "--lam1", "s", "--lam2", "t"),
])
def test_commands_are_deterministic(argv):
    first = run(*argv)
    second = run(*argv)
    assert first[0] == 0, first[2]
    assert first == second


def test_specific_results():
    assert results("eq", "i2_3", "s t s", "t s t")["equal"]
    assert results("len", "ex-periagroup-z6", "v4^3")["length_S"] == 3
    assert results("series-product", "1,2,2,2", "1,2,2,2")["coefficients"] == [1, 4, 8, 12]
    assert results("omega", "mixed_s3_z3")["fibers"] == {"u": 3}
    assert results("coxeter-classify", "h4.cox")["components"][0]["type"] == "H4"
    r = results("disjoint-cosets", "c4_racg", "--psi", "a,b", "--lam1", "a", "--lam2", "b")
    assert r["exists"] is False and r["verified"] is True
    r = results("skewer-witness", "f2", "a b", "--radius", "3")
    assert r["found"] and r["witness"]["L"] == 0


def test_tsv_output():
    code, out, _ = run("conj-growth", "i2_3", "--max-n", "3", "--tsv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "command\tconj-growth"
    assert "series\t1,1,1,0" in lines


def test_exit_codes():
    assert run("nope")[0] == 2
    assert run("check", "does-not-exist.peria")[0] == 2
    assert run("nf", "dinf", "x9")[0] == 1
    assert run("classify-element", "i2_5", "s")[0] == 1
    assert run("conj-growth", "s3_table", "--method", "exact-gp")[0] == 1
    assert run("graph-check")[0] == 2


def test_malformed_file_is_a_domain_error(tmp_path):
    bad = tmp_path / "bad.peria"
    bad.write_text("vertex a cyclic 1\n")
    code, out, err = run("check", str(bad))
    assert code == 1 and "line 1" in err and out == ""


def test_help_lists_every_command():
    proc = subprocess.run([sys.executable, "-m", "peria.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for name in COMMANDS:
        assert name in proc.stdout
    assert len(COMMANDS) == 21


def test_ball_exponent_cap():
    code, _, err = run("ball", "z2", "--radius", "2")
    assert code == 1 and "exponent cap" in err
    r = results("ball", "z2", "--radius", "2", "--exponent-cap", "2")
    # generators a^+-1, a^+-2, b^+-1, b^+-2
    assert r["sphere_sizes"][1] == 8
