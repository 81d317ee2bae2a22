import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from oneclock.core import tw
from oneclock.difftest import MODES, difftest, shrink_counterexample, word_text
from oneclock.generators import random_formula, random_word
from oneclock.logic import evaluate, parse_formula, props_of, walk


@pytest.mark.parametrize("mode", MODES)
def test_every_mode_agrees(mode):
    report = difftest(mode, seed=1, count=4, words=8, word_len=4)
    assert report.agree + len(report.resource) == 4, report.text()
    assert report.disagreements == []


def test_reports_are_byte_identical():
    one = difftest("compile", seed=3, count=12, words=10)
    again = difftest("compile", seed=3, count=12, words=10)
    parallel = difftest("compile", seed=3, count=12, words=10, jobs=2)
    assert one.text() == again.text() == parallel.text()
    assert json.dumps(one.to_json()) == json.dumps(parallel.to_json())


def test_unknown_mode():
    with pytest.raises(ValueError):
        difftest("nonsense")


def test_shrinker_reaches_a_minimal_word():
    phi = parse_formula("Rat[(0,3)]{(a + b)*.b} & a")
    w = tw(("a", 0), ("ab", "1/2"), ("a", 1), ("b", "3/2"), ("ab", 2))

    def disagrees(f, v):
        return any("b" in p for p in v.props) and "b" in props_of(f)

    f2, w2 = shrink_counterexample(phi, w, disagrees)
    assert disagrees(f2, w2)
    assert len(w2) == 1 and w2.props == [frozenset("b")]
    assert sum(1 for _ in walk(f2)) <= sum(1 for _ in walk(phi))


def test_word_text():
    assert word_text(tw(("ab", 0), ("b", "7/10"))) == "({a,b},0) ({b},7/10)"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_shrinking_keeps_a_planted_bug(seed):
    # a faulty "translation" that ignores every b; its disagreements must survive shrinking
    rng = random.Random(seed)
    phi = random_formula(rng, "ab", max_md=1)
    w = random_word(rng, "ab", rng.randint(1, 6))

    def buggy(f, v):
        return evaluate(f, v.__class__((p - {"b"} or {"a"}, t) for p, t in v))

    def disagrees(f, v):
        return evaluate(f, v) != buggy(f, v)

    if not disagrees(phi, w):
        return
    f2, w2 = shrink_counterexample(phi, w, disagrees)
    assert disagrees(f2, w2)
    assert len(w2) <= len(w)
    assert sum(1 for _ in walk(f2)) <= sum(1 for _ in walk(phi))
