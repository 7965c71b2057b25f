import json
import subprocess
import sys

import pytest

from fomlkit.cli import main

from conftest import FIXTURES, read

PN = str(FIXTURES / "petri.m2l")
RENAMES = "n=Node,p=Place,tr=Transition,a=Arc,tok=Tokens"


def fx(name):
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_conforming(capsys):
    code, out, _ = run(capsys, "check", PN, fx("barber.m2m"))
    assert code == 0
    assert out.splitlines()[-2:] == ["4/4 constraints hold", "conforms"]


def test_check_verbose_lists_passing(capsys):
    code, out, _ = run(capsys, "--verbose", "check", PN, fx("barber.m2m"))
    assert code == 0
    assert "  ok    single_arc" in out.splitlines()


@pytest.mark.parametrize("name,failing,witness", [
    ("mutant_place_arc", "alternate_place", "x=wait, y=idle, u=a7"),
    ("mutant_double_arc", "single_arc", "u=a1, v=a7"),
    ("mutant_untyped_node", "abstract_node", "x=stray"),
])
def test_check_mutants(capsys, name, failing, witness):
    code, out, _ = run(capsys, "check", PN, fx(name + ".m2m"))
    assert code == 1
    fails = [l for l in out.splitlines() if l.startswith("  FAIL")]
    assert fails == ["  FAIL  %s  witness: %s" % (failing, witness)]
    assert out.endswith("does not conform\n")


@pytest.mark.parametrize("name", ["barber", "mutant_place_arc",
                                  "mutant_double_arc", "mutant_untyped_node"])
def test_check_json_golden(capsys, name):
    _, out, _ = run(capsys, "--format", "json", "check", PN, fx(name + ".m2m"))
    assert json.loads(out) == json.loads(read("golden/check_%s.json" % name))
    assert out == read("golden/check_%s.json" % name)


def test_check_empty_model(capsys):
    code, out, _ = run(capsys, "check", PN, fx("empty.m2m"))
    assert code == 0 and "4/4" in out


def test_missing_file(capsys):
    code, _, err = run(capsys, "check", PN, fx("nope.m2m"))
    assert code == 2 and "cannot read" in err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.m2m"
    bad.write_text("model b : PN {\n  Place ;\n}\n")
    code, _, err = run(capsys, "check", PN, str(bad))
    assert code == 2
    assert "bad.m2m:2:" in err


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_derive(capsys, tmp_path):
    out = tmp_path / "pn.m2l"
    code, _, _ = run(capsys, "derive", fx("petri_meta.m2m"), str(out),
                     "--constraints", fx("petri_constraints.m2c"),
                     "--rename", RENAMES)
    assert code == 0
    assert out.read_text() == read("petri.m2l")


def test_derive_empty_metamodel(capsys):
    code, out, _ = run(capsys, "derive", fx("empty_meta.m2m"), "-")
    assert code == 0 and out == "language empty {\n}\n"


def test_derive_rejects_bad_rename(capsys):
    code, _, err = run(capsys, "derive", fx("petri_meta.m2m"), "-",
                       "--rename", "n")
    assert code == 2 and "key=value" in err


def test_derive_collision(capsys):
    code, _, err = run(capsys, "derive", fx("petri_meta.m2m"), "-",
                       "--rename", "n=Node,p=Node")
    assert code == 1


def test_fuse(capsys, tmp_path):
    out = tmp_path / "uml.m2l"
    code, _, _ = run(capsys, "fuse", fx("uml_cd.m2l"), fx("uml_sd.m2l"),
                     fx("uml.m2b"), str(out))
    assert code == 0
    assert out.read_text() == read("golden/uml_fused.m2l")


def test_fused_check(capsys):
    fused = fx("golden/uml_fused.m2l")
    assert run(capsys, "check", fused, fx("uml_good.m2m"))[0] == 0
    code, out, _ = run(capsys, "check", fused, fx("uml_bad.m2m"))
    assert code == 1
    assert "  FAIL  called_operation_owned  witness: x=m2" in out.splitlines()


def test_restrict(capsys):
    code, out, _ = run(capsys, "restrict", PN, "Node,Place,Transition", "-")
    assert code == 0
    assert "Arc" not in out and "Place" in out


def test_restrict_unknown_type(capsys):
    code, _, _ = run(capsys, "restrict", PN, "Ghost", "-")
    assert code == 1


def test_event(capsys):
    code, out, _ = run(capsys, "event", PN, fx("barber.m2m"), "fire", "t=serve")
    assert code == 0
    assert out == read("golden/barber_after_serve.m2m")


def test_event_disabled(capsys):
    code, _, err = run(capsys, "event", PN, fx("barber.m2m"), "fire", "t=done")
    assert code == 1 and "PRECONDITION_FAILED" in err


def test_event_enabled(capsys):
    code, out, _ = run(capsys, "event", PN, fx("barber.m2m"), "fire",
                       "--enabled")
    assert code == 0 and out == "t=enter\nt=serve\n"
    code, out, _ = run(capsys, "event", PN, fx("golden/barber_after_serve.m2m"),
                       "fire", "--enabled")
    assert out == "t=done\nt=enter\n"


def test_event_unknown(capsys):
    code, _, _ = run(capsys, "event", PN, fx("barber.m2m"), "explode")
    assert code == 1


def test_bootstrap(capsys):
    code, out, _ = run(capsys, "bootstrap")
    assert code == 0
    assert "11/11 constraints hold" in out
    assert "derived signature matches the built-in" in out


def test_bootstrap_json(capsys):
    _, out, _ = run(capsys, "--format", "json", "bootstrap")
    data = json.loads(out)
    assert data["conforms"] and data["self_describing"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fomlkit.cli", "check", PN,
                           fx("mutant_double_arc.m2m")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "single_arc" in proc.stdout
