import io
import json
import random
import sys

import pytest
from conftest import CORPUS

from oneclock.ata import ATA, accepts
from oneclock.cli import main
from oneclock.core import TimedWord, tw
from oneclock.generators import random_words
from oneclock.logic import evaluate, parse_formula


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_eval_verdicts(capsys):
    assert run(capsys, "eval", CORPUS / "pair_until.ratmtl", CORPUS / "pair_until_yes.word") == (0, "true", "")
    code, out, _ = run(capsys, "--json", "eval", CORPUS / "pair_until.ratmtl", CORPUS / "pair_until_no.word")
    assert code == 0 and json.loads(out)["verdict"] is False


def test_classify_cd_automaton(capsys):
    code, out, _ = run(capsys, "classify", CORPUS / "cd_a.ata")
    report = json.loads(out)
    assert code == 0 and report["cd"] is True and report["lfr"] is False


def test_normalize_then_classify(capsys, monkeypatch):
    _, normal, _ = run(capsys, "normalize", CORPUS / "B.ata")
    code, out, _ = run(capsys, "classify", "-", stdin=normal, monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out)["normal"] is True


def test_expectation_failure_exit_code(capsys):
    code, _, err = run(capsys, "classify", CORPUS / "cd_a.ata", "--expect", "lfr")
    assert code == 1 and json.loads(err)["error"] == "PropertyViolation"
    assert run(capsys, "classify", CORPUS / "cd_a.ata", "--expect", "!lfr")[0] == 0


def test_input_error_exit_code(capsys, tmp_path):
    assert run(capsys, "eval", tmp_path / "missing.ratmtl", CORPUS / "pair_until_yes.word")[0] == 2
    bad = tmp_path / "bad.ratmtl"
    bad.write_text("a & Rat[(0,1){b}")
    code, _, err = run(capsys, "eval", bad, CORPUS / "pair_until_yes.word")
    assert code == 2 and "column" in json.loads(err)


def test_precondition_error_exit_code(capsys):
    code, _, err = run(capsys, "untime", CORPUS / "po.ata")
    assert code == 2 and json.loads(err)["error"] == "PreconditionError"


def test_resource_error_exit_code(capsys, tmp_path):
    formula = tmp_path / "sets.qmso"
    formula.write_text("ES T. A t > t0. T(t)")
    word = tmp_path / "long.word"
    word.write_text(json.dumps(tw(*[("a", k) for k in range(12)]).to_json()))
    assert run(capsys, "mso-eval", formula, word)[0] == 3


def test_compile_writes_an_automaton(capsys, tmp_path):
    target = tmp_path / "out.ata"
    code, _, _ = run(capsys, "compile", CORPUS / "pair_until.ratmtl", "--alphabet", "a,b", "-o", target)
    assert code == 0
    A = ATA.from_json(json.loads(target.read_text()))
    phi = parse_formula((CORPUS / "pair_until.ratmtl").read_text())
    assert accepts(A, tw(("a", 0), ("a", "1/4"), ("a", "1/2"), ("b", "3/4")))
    for w in random_words(random.Random(4), "ab", 50):
        assert accepts(A, w) == evaluate(phi, w)


def test_decompile_then_eval(capsys, tmp_path):
    code, out, _ = run(capsys, "decompile", CORPUS / "po.ata")
    assert code == 0
    formula = tmp_path / "po.ratmtl"
    formula.write_text(out)
    A = ATA.from_json(json.loads((CORPUS / "po.ata").read_text()))
    for w in random_words(random.Random(3), "ab", 10):
        path = tmp_path / "w.word"
        path.write_text(json.dumps(w.to_json()))
        _, verdict, _ = run(capsys, "eval", formula, path)
        assert verdict == str(accepts(A, w)).lower()


def test_fixpoint_and_mso_commands(capsys):
    code, out, _ = run(capsys, "fixpoint-eval", CORPUS / "mu_chain.ratmtl", CORPUS / "mu_chain_four.word")
    assert code == 0 and out.splitlines()[-1] == "true"
    assert run(capsys, "mso-eval", CORPUS / "time_block.qmso", CORPUS / "time_block.word")[1] == "true"
    code, out, _ = run(capsys, "translate", CORPUS / "nested_mu_nu.ratmtl", "--target", "equations")
    assert out == (CORPUS / "nested_mu_nu.eqs").read_text().strip()


def test_difftest_command(capsys):
    code, out, _ = run(capsys, "difftest", "--mode", "compile", "--seed", "7", "--count", "50")
    assert code == 0 and out == "50/50 agree"


@pytest.mark.parametrize("mode", ["fixpoint", "mso"])
def test_difftest_other_modes(capsys, mode):
    code, out, _ = run(capsys, "difftest", "--mode", mode, "--count", "10", "--word-len", "5")
    assert code == 0 and out == "10/10 agree"


def test_word_file_round_trip(tmp_path):
    w = tw(("ab", 0), ("b", "7/10"))
    path = tmp_path / "w.word"
    path.write_text(json.dumps(w.to_json()))
    assert TimedWord.from_json(json.loads(path.read_text())) == w
