import json
import subprocess
import sys

import pytest

from ambilogic.cli import main
from ambilogic.structure import load_model


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestValidate:
    def test_atd(self, capsys):
        code, out, _ = run(capsys, "validate", "examples/atd.json")
        assert code == 0 and out.startswith("validate: pass")

    def test_critical_a6(self, capsys):
        code, out, _ = run(capsys, "validate", "critical", "--ai-mode", "out-ai")
        assert code == 1
        assert "A6: FAIL" in out and '"state": "w12"' in out

    def test_garbage(self, capsys, tmp_path):
        bad = tmp_path / "garbage.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "validate", str(bad))
        assert code == 2 and "invalid JSON" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "no/such/model.json")
        assert code == 2 and "bundled models" in err


class TestEval:
    def test_agree_to_disagree(self, capsys):
        code, out, _ = run(capsys, "eval", "atd.json", "CB_{1,2}(B_1(p) & B_2(!p))", "--mode", "in")
        assert code == 0
        assert [line.split()[-1] for line in out.splitlines()[1:]] == ["true", "true"]

    def test_out_viewpoint2(self, capsys):
        code, out, _ = run(capsys, "eval", "atd", "CB_{1,2}(p)", "--mode", "out", "--viewpoint", "2")
        assert code == 1 and out.splitlines()[1].split() == ["w", "2", "false"]

    def test_true(self, capsys):
        code, out, _ = run(capsys, "--json", "eval", "example2", "true")
        data = json.loads(out)
        assert code == 0 and data["all_true"] and len(data["rows"]) == 6

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "eval", "atd", "p &")
        assert code == 2 and "line 1" in err

    def test_eb_cap(self, capsys):
        code, _, err = run(capsys, "eval", "atd", "EB^9_{1}(p)")
        assert code == 2 and "cap" in err

    def test_conditioning_undefined(self, capsys, tmp_path):
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({
            "states": ["a", "b", "c"], "players": 2, "propositions": ["x"],
            "partitions": [[["a"], ["b", "c"]], [["a", "b", "c"]]],
            "posteriors": [[{"a": "1"}, {"b": "1"}], [{"a": "1/2", "b": "1/2"}]],
            "interpretations": [{"a": [], "b": ["x"], "c": ["x"]}, {"a": [], "b": [], "c": ["x"]}],
            "priors": [{"a": "1/2", "b": "1/2", "c": "0"}, {"a": "1/2", "b": "1/2", "c": "0"}],
            "cell_labels": [["!x", "x"], ["true"]],
        }))
        code, _, err = run(capsys, "eval", str(path), "B_1(x)", "--mode", "out-ai", "--viewpoint", "2")
        assert code == 2 and "player 1" in err and "viewpoint 2" in err

    def test_unknown_state(self, capsys):
        code, _, err = run(capsys, "eval", "atd", "p", "--state", "zz")
        assert code == 2 and "unknown state" in err

    def test_bad_mode_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "atd", "p", "--mode", "sideways"])
        assert exc.value.code == 2


class TestAnalyze:
    def test_signals(self, capsys):
        code, out, _ = run(capsys, "analyze", "example2.json", "signals", "--state", "w1", "--mode", "in")
        assert code == 0 and out.startswith("common: yes, public: no, shared: no")

    def test_cpa(self, capsys):
        assert run(capsys, "analyze", "example2", "cpa")[0] == 0
        code, out, _ = run(capsys, "analyze", "no_equiv", "cpa")
        assert code == 1 and "priors differ" in out

    def test_priors(self, capsys):
        code, out, _ = run(capsys, "analyze", "example2", "priors")
        assert code == 0 and "prior of player 1: w1=1/4, w2=1/4, w3=1/2" in out

    def test_ambiguity(self, capsys):
        code, out, _ = run(capsys, "analyze", "atd", "ambiguity", "--formula", "p")
        assert code == 0 and out.startswith("epsilon = 1")

    def test_agreement(self, capsys):
        code, out, _ = run(capsys, "analyze", "atd", "agreement", "--formula", "p", "--b", "1/2", "--b2", "3/2")
        assert code == 0 and out.startswith("vacuous")
        code, out, _ = run(capsys, "analyze", "no_equiv", "agreement")
        assert code == 1 and out.startswith("precondition")

    def test_posteriors(self, capsys):
        code, out, _ = run(capsys, "--json", "analyze", "example2", "posteriors", "--state", "w1")
        data = json.loads(out)
        assert code == 1
        assert data["report"]["events"]["witness"] == {"event": ["w2"], "values": ["1/2", "0"]}

    def test_aumann(self, capsys):
        assert run(capsys, "analyze", "example2", "aumann")[0] == 0
        assert run(capsys, "analyze", "atd", "aumann")[0] == 1
        code, out, _ = run(capsys, "analyze", "atd", "aumann", "--force")
        assert code == 0 and "escapes: 2" in out


class TestTransform:
    def test_copies(self, capsys, tmp_path):
        out = tmp_path / "c.json"
        code, text, _ = run(capsys, "transform", "atd", "copies", "--verify", "--depth", "2", "--out", str(out))
        assert code == 0 and "equivalent (family size" in text
        assert load_model(out).states == ("w#1", "w#2")
        rows = json.loads(out.with_suffix(".pairing.json").read_text())
        assert {"state": "w", "viewpoint": 1, "to_state": "w#1", "to_viewpoint": 1} in rows

    def test_project(self, capsys, tmp_path):
        out = tmp_path / "p.json"
        code, text, _ = run(capsys, "transform", "atd", "project", "--player", "1", "--verify", "--out", str(out))
        assert code == 0 and "equivalent" in text

    def test_labels(self, capsys, tmp_path):
        out = tmp_path / "l.json"
        code, text, _ = run(capsys, "transform", "example2", "labels", "--state", "w1", "--out", str(out))
        assert code == 0 and "validate_ai[out-ai]: pass" in text

    def test_default_output_name(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, text, _ = run(capsys, "transform", "atd", "copies")
        assert code == 0
        assert (tmp_path / "atd-copies.json").exists() and (tmp_path / "atd-copies.pairing.json").exists()

    def test_missing_player(self, capsys, tmp_path):
        code, _, err = run(capsys, "transform", "atd", "project", "--out", str(tmp_path / "x.json"))
        assert code == 2 and "--player" in err


class TestSweepAndGen:
    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--suite", "aumann", "--seeds", "1..20")
        assert code == 0 and out.strip() == "aumann: 0 violations over 20 seeds"

    def test_unknown_suite(self, capsys):
        assert run(capsys, "sweep", "--suite", "nope", "--seeds", "1")[0] == 2

    def test_gen_deterministic(self, capsys):
        a = run(capsys, "gen", "--seed", "7", "--signals")[1]
        b = run(capsys, "--seed", "7", "gen", "--signals")[1]
        assert a == b and json.loads(a)["signals"]

    def test_depth_cap(self):
        with pytest.raises(SystemExit) as exc:
            main(["--depth", "4", "sweep", "--suite", "aumann"])
        assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["analyze", "example2", "signals", "--state", "w1"],
    ["analyze", "example2", "aumann"],
    ["validate", "critical", "--ai-mode", "in-ai"],
    ["eval", "example2", "B_1(p)"],
    ["sweep", "--suite", "cb-unrolling", "--seeds", "1..3"],
])
def test_json_roundtrip(capsys, argv):
    code, out, _ = run(capsys, "--json", *argv)
    data = json.loads(out)
    assert json.loads(json.dumps(data)) == data
    code2, out2, _ = run(capsys, "--json", *argv)
    assert (code, out) == (code2, out2)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ambilogic.cli", "eval", "atd", "true"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "true" in proc.stdout
