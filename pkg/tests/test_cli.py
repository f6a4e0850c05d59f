import json
import subprocess
import sys

import pytest

from motkit import cli, zoo
from motkit.modelfile import dumps


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def machine(capsys, *argv):
    code, out = run(capsys, *argv, "--output", "machine")
    return code, json.loads(out)


@pytest.mark.parametrize("argv, code", [
    (["validate", "zoo:conic"], 0),
    (["decompose", "zoo:p3", "--config", "decompose"], 0),
    (["decompose", "zoo:conic", "--config", "decompose-E"], 0),
    (["classify", "zoo:conic", "--config", "classify-N"], 0),
    (["lemma3", "zoo:conic", "--config", "lemma3-smoke"], 0),
    (["theorem", "zoo:conic", "--config", "theorem-smoke"], 0),
    (["lemma3", "zoo:synth1", "--config", "lemma3"], 0),
    (["theorem", "zoo:synth1", "--config", "theorem"], 0),
    (["lemma3", "zoo:conic", "--config", "zero-h"], 2),
    (["lemma3", "zoo:adversarial", "--config", "lemma3"], 2),
    (["theorem", "zoo:adversarial", "--config", "theorem"], 2),
    (["theorem", "zoo:twopoint", "--config", "theorem"], 2),
])
def test_exit_codes(capsys, argv, code):
    got, doc = machine(capsys, *argv)
    assert got == code == doc["exit_code"]
    assert doc["status"] == {0: "verified", 1: "verification-failed", 2: "hypothesis-violated"}[code]


def test_messages_name_the_violation(capsys):
    _, doc = machine(capsys, "lemma3", "zoo:conic", "--config", "zero-h")
    assert "lower-ness violated" in doc["error"]
    _, doc = machine(capsys, "theorem", "zoo:twopoint", "--config", "theorem")
    assert "multiple top classes" in doc["error"]
    _, doc = machine(capsys, "lemma3", "zoo:adversarial", "--config", "lemma3")
    assert "hypothesis-1 violated" in doc["error"]


def test_machine_output_is_byte_stable(capsys):
    argv = ["theorem", "zoo:synth1", "--config", "theorem", "--output", "machine"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    doc = json.loads(first[1])
    assert doc["result"]["n1_first"] == 2
    assert {"tool", "version", "command", "seed", "transcript", "assertions", "result"} <= doc.keys()


def test_seed_precedence(capsys, monkeypatch):
    monkeypatch.setenv("MOTKIT_SEED", "41")
    _, doc = machine(capsys, "validate", "zoo:conic")
    assert doc["seed"] == 41
    _, doc = machine(capsys, "validate", "zoo:conic", "--seed", "7")
    assert doc["seed"] == 7
    monkeypatch.setenv("MOTKIT_SEED", "forty")
    code, doc = machine(capsys, "validate", "zoo:conic")
    assert code == 2 and "MOTKIT_SEED" in doc["error"]


def test_decomposition_is_seed_independent(capsys):
    outs = [machine(capsys, "decompose", "zoo:synth1", "--config", "decompose-E", "--seed", str(s))[1]
            for s in (0, 1, 2)]
    assert all(o["exit_code"] == 0 for o in outs)
    assert len({json.dumps([s["profile"] for s in o["result"]["summands"]]) for o in outs}) == 1


def test_malformed_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format_version": "1.0",\n "p": 2,,\n}')
    code, doc = machine(capsys, "validate", str(path))
    assert code == 2
    assert doc["error"].startswith(f"{path}:2:")


def test_expectation_mismatch_exits_one(capsys, tmp_path):
    doc = zoo.preset("conic")
    doc["runs"]["decompose-E"]["expect"]["summands"] = 3
    path = tmp_path / "conic.json"
    path.write_text(dumps(doc))
    code, out = machine(capsys, "decompose", str(path), "--config", "decompose-E")
    assert code == 1
    assert "expected summands = 3" in out["error"]


def test_inline_config_and_summand(capsys):
    code, doc = machine(capsys, "decompose", "zoo:conic", "--summand", '{"expr": "C", "projector": "identity"}',
                        "--field", "E")
    assert code == 0 and doc["result"]["count"] == 2
    code, doc = machine(capsys, "decompose", "zoo:conic", "--config", '{"task": "classify"}')
    assert code == 2


def test_text_output(capsys):
    code, out = run(capsys, "theorem", "zoo:conic", "--config", "theorem-smoke")
    assert code == 0
    assert out.startswith("motkit theorem zoo:conic (seed 0): verified")
    assert "θ = " in out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "motkit.cli", "validate", "zoo:p2", "--output", "machine"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "verified"
