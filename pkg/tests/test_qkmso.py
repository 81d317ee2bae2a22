import itertools
import random

import pytest
from conftest import corpus_formula, corpus_path, corpus_word
from hypothesis import given, settings, strategies as st

from oneclock.core import tw
from oneclock.errors import PreconditionError, ResourceError
from oneclock.generators import random_formula, random_words
from oneclock.logic import TRUE, Prop, evaluate, parse_formula, parse_regex, single_match
from oneclock.qkmso import (Qa, eval_mso, format_qformula, fratmtl_to_q2mso, metric_depth, parse_qformula,
                            ratmtl_to_qkmso, regex_to_mso, validate)


def load(name):
    return parse_qformula(corpus_path(name).read_text())


def test_time_block_formula():
    psi = load("time_block.qmso")
    assert validate(psi, 3, free=("x",)) == []
    assert validate(psi, 2, free=("x",)) != []
    assert eval_mso(psi, corpus_word("time_block"), {"x": 1}) is True
    assert metric_depth(psi) == 1


def test_unrelativized_quantifier_is_invalid():
    assert validate(parse_qformula("E t. Q_a(t)"), 2) != []
    assert validate(parse_qformula("E t > t0. Q_a(t)"), 2) == []


def test_bounded_response_sentence():
    psi = load("bounded_response.qmso")
    assert metric_depth(psi) == 2
    assert eval_mso(psi, tw(("a", 0), ("a", "3/2"), ("b", "5/2")), {})
    assert not eval_mso(psi, tw(("a", 0), ("a", "3/2"), ("a", "2")), {})


def test_set_quantifier_witness():
    assert eval_mso(parse_qformula("ES T. T(t1)"), tw(("a", 0), ("b", 1)), {"t1": 2})
    assert metric_depth(parse_qformula("ES T. E t > t0. T(t)")) == 0


def test_length_cap():
    psi = parse_qformula("ES T. A t > t0. T(t)")
    with pytest.raises(ResourceError):
        eval_mso(psi, tw(*[("a", k) for k in range(12)]), {"t0": 1})


def test_text_round_trip():
    for name in ("time_block.qmso", "bounded_response.qmso"):
        psi = load(name)
        assert parse_qformula(format_qformula(psi)) == psi


def segment_words(n):
    for letters in itertools.product("ab", repeat=n):
        yield tw(("b", 0), *[(c, k + 1) for k, c in enumerate(letters)])


def test_single_letter_segment():
    zeta = regex_to_mso(parse_regex("a"), "x", "y")
    w = tw(("b", 0), ("a", 1), ("b", 2), ("a", 3))
    for y in range(1, 5):
        assert eval_mso(zeta, w, {"x": 1, "y": y}) == (y == 2)


def test_even_segments():
    zeta = regex_to_mso(parse_regex("(a.a)*"), "x", "y")
    for n in range(0, 4):
        for w in segment_words(n):
            want = n % 2 == 0 and all(p == {"a"} for p in w.props[1:])
            assert eval_mso(zeta, w, {"x": 1, "y": n + 1}) == want


def test_star_segment_is_universal_check():
    zeta = regex_to_mso(parse_regex("a*"), "x", "y")
    for n in range(0, 4):
        for w in segment_words(n):
            assert eval_mso(zeta, w, {"x": 1, "y": n + 1}) == all(p == {"a"} for p in w.props[1:])


def test_proposition_translation():
    assert ratmtl_to_qkmso(Prop("a")) == Qa("a", "t0")
    assert eval_mso(fratmtl_to_q2mso(TRUE), tw(("a", 0)), {"t0": 1})


def test_translations_on_corpus_formula():
    phi = corpus_formula("pair_until")
    psi = ratmtl_to_qkmso(phi)
    for name in ("pair_until_yes", "pair_until_no"):
        w = corpus_word(name)
        assert eval_mso(psi, w, {"t0": 1}) == evaluate(phi, w)


def test_nested_window_translation():
    phi = parse_formula("Rat[(1,2)]{<a -> Rat[[1,1]]{<~b>*.b}>*}")
    psi = ratmtl_to_qkmso(phi)
    for w in random_words(random.Random(4), "ab", 100):
        assert eval_mso(psi, w, {"t0": 1}) == evaluate(phi, w)


def test_until_lands_in_q2mso():
    phi = parse_formula("FRat[(0,1)]{a*}(b)")
    chi = fratmtl_to_q2mso(phi)
    assert validate(chi, 2) == []
    for w in random_words(random.Random(5), "ab", 100):
        assert eval_mso(chi, w, {"t0": 1}) == evaluate(phi, w)


def test_q2mso_rejects_rat():
    with pytest.raises(PreconditionError):
        fratmtl_to_q2mso(parse_formula("Rat[(0,1)]{a}"))


def test_translation_rejects_fixpoints():
    with pytest.raises(PreconditionError):
        ratmtl_to_qkmso(corpus_formula("mu_chain"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_segment_encoding_matches_regex_matcher(seed):
    rng = random.Random(seed)
    regex = rng.choice(["a.b*", "(a+b).a", "(a.b)*", "a*.b", "(a+b)*.b.a"])
    zeta = regex_to_mso(parse_regex(regex), "x", "y")
    n = rng.randint(0, 4)
    letters = [frozenset(rng.choice(["a", "b", "ab"])) for _ in range(n)]
    w = tw(("a", 0), *[(p, k + 1) for k, p in enumerate(letters)])
    labels = [{Prop(q) for q in p} for p in letters]
    assert eval_mso(zeta, w, {"x": 1, "y": n + 1}) == single_match(parse_regex(regex), labels)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_translations_agree_with_evaluation(seed):
    rng = random.Random(seed)
    fragment = rng.choice(["ratmtl", "fratmtl"])
    phi = random_formula(rng, "ab", max_md=2, max_size=8, fragment=fragment)
    psi = ratmtl_to_qkmso(phi)
    assert validate(psi, 4) == []
    chi = fratmtl_to_q2mso(phi) if fragment == "fratmtl" else None
    if chi is not None:
        assert validate(chi, 2) == []
    for w in random_words(rng, "ab", 10, max_len=5):
        want = evaluate(phi, w)
        assert eval_mso(psi, w, {"t0": 1}) == want
        if chi is not None:
            assert eval_mso(chi, w, {"t0": 1}) == want
