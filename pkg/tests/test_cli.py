import json
import subprocess
import sys

import pytest

from doctrina import pack
from doctrina.analysis import doctrine_equivalence
from doctrina.cli import SCHEMA, main, run
from doctrina.instance import parse_text, shipped


def invoke(*argv, env=None):
    rep, code, fmt = run(list(argv), env or {})
    return rep, code


def as_json(rep):
    data = json.loads(rep.to_json())
    data.pop("timing")
    return data


def test_complete_emits_a_parseable_doctrine():
    rep, code = invoke("complete", "--class=all", "C2-trivial", "--instance", str(shipped("C2")))
    assert code == 0
    inst = parse_text(rep.to_text())
    P = inst.doctrine(inst.names("doctrines")[0])
    assert doctrine_equivalence(P, pack.doctrine("Psi_C2")) is not None


def test_suite_single_theorem():
    rep, code = invoke("suite", "T-EPS", "terminal-CH3")
    assert code == 0 and rep.verdict == "pass"


def test_equiv_regular_completion():
    rep, code = invoke("equiv", "reg(Psi_C2)", "reglex(C2)")
    assert code == 0


def test_characterize_negative_has_witness():
    rep, code = invoke("analyze", "characterize", "C2-over-a")
    assert code == 1
    assert "u" in json.dumps(as_json(rep)["witnesses"])


def test_json_schema_and_determinism():
    a, _ = invoke("--format", "json", "analyze", "choice", "Psi_V")
    b, _ = invoke("--format", "json", "analyze", "choice", "Psi_V")
    assert json.loads(a.to_json())["schema"] == SCHEMA
    assert as_json(a) == as_json(b)
    assert a.to_json() == json.dumps(json.loads(a.to_json()), sort_keys=True, indent=2)


def test_cap_flag_and_environment():
    _, code = invoke("complete", "--cap", "2", "Psi_CH3")
    assert code == 2
    _, code = invoke("complete", "Psi_CH3", env={"DOCTRINA_CAP": "2"})
    assert code == 2
    # the flag wins over the environment
    _, code = invoke("complete", "--cap", "4096", "Psi_CH3", env={"DOCTRINA_CAP": "2"})
    assert code == 0
    _, code = invoke("complete", "Psi_CH3", env={"DOCTRINA_CAP": "many"})
    assert code == 3


@pytest.mark.parametrize("argv", [["bogus"], ["suite", "T-NOPE"], ["complete", "no-such-doctrine"],
                                  ["construct", "widget", "Psi_C2"], ["check", "--instance", "/nonexistent.yaml"]])
def test_usage_errors(argv):
    rep, code = invoke(*argv)
    assert rep is None and code == 3


def test_check_reports_broken_instance_as_failure(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("categories:\n  C:\n    objects: [a]\n    morphisms: [[id_a, a, nowhere]]\n")
    _, code = invoke("check", "--instance", str(bad))
    assert code == 1
    _, code = invoke("complete", "P", "--instance", str(bad))
    assert code == 3


def test_check_shipped_instance():
    _, code = invoke("check", "--instance", str(shipped("C2")))
    assert code == 0


def test_examples_out(tmp_path):
    _, code = invoke("examples", "--out", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("*.yaml")) == ["C2.yaml", "FSprime.yaml", "pack.yaml"]
    _, code = invoke("check", "--instance", str(tmp_path / "pack.yaml"))
    assert code == 0


def test_construct_and_analyze_verbs():
    for argv in (["construct", "reg", "C2-over-b"], ["construct", "comprehension", "Psi_C2"],
                 ["analyze", "free", "Psi_C2"], ["analyze", "epsilon", "terminal-CH3"],
                 ["analyze", "epsilon-iff", "terminal-B4"]):
        rep, code = invoke(*argv)
        assert code in (0, 1), argv
        assert rep.results


def test_main_prints_usage_on_error(capsys):
    assert main(["bogus"]) == 3
    assert "usage:" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "doctrina", "--format", "json", "suite", "T-EPS", "terminal-CH3"],
                         capture_output=True, text=True, timeout=120)
    assert out.returncode == 0
    assert json.loads(out.stdout)["verdict"] == "pass"
