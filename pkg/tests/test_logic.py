import random

import pytest
from conftest import corpus_formula, corpus_word
from hypothesis import given, settings, strategies as st

from oneclock.core import Interval, tw
from oneclock.errors import InputError, PreconditionError
from oneclock.generators import random_formula, random_words
from oneclock.logic import (EPS, TRUE, Atom, Concat, Prop, Rat, Star, URat, desugar_until, evaluate,
                            format_formula, language_membership, modal_depth, neg, parse_formula,
                            parse_regex, truth_table, until, urat_to_frat)


def test_parse_urat():
    phi = parse_formula("URat[(0,1)]{(a.a)*}(a, b)")
    assert phi == URat(Interval.open(0, 1), Star(Concat(Atom(Prop("a")), Atom(Prop("a")))), Prop("a"), Prop("b"))
    assert parse_formula("true") == TRUE


def test_parse_nested_rat():
    phi = parse_formula("Rat[(0,2)]{ <URat[(0,1)]{b.b*}(a,c)> . e . e* }")
    assert isinstance(phi, Rat) and phi.interval == Interval.open(0, 2)
    inner = phi.regex.left.left.formula
    assert inner == URat(Interval.open(0, 1), parse_regex("b.b*"), Prop("a"), Prop("c"))
    assert phi == corpus_formula("nested_rat")


def test_parse_errors_carry_positions():
    with pytest.raises(InputError) as err:
        parse_formula("a & Rat[(0,1){b}")
    assert "column" in str(err.value)
    with pytest.raises(InputError):
        parse_formula("Z | a")


def test_format_round_trip():
    for name in ("pair_until", "nested_rat", "mu_chain", "mu_frat"):
        phi = corpus_formula(name)
        assert parse_formula(format_formula(phi)) == phi


def test_modal_depth():
    assert modal_depth(parse_formula("a & ~b")) == 0
    assert modal_depth(corpus_formula("pair_until")) == 1
    assert modal_depth(corpus_formula("nested_rat")) == 2


def test_pair_until_verdicts():
    phi = corpus_formula("pair_until")
    assert evaluate(phi, corpus_word("pair_until_yes"), 1) is True
    assert evaluate(phi, corpus_word("pair_until_no"), 1) is False
    assert language_membership(phi, corpus_word("pair_until_yes"))


def test_nested_rat_verdicts():
    phi = corpus_formula("nested_rat")
    assert evaluate(phi, corpus_word("nested_rat_yes")) is True
    assert evaluate(phi, corpus_word("nested_rat_no")) is False


def test_empty_window_holds_only_at_the_last_position():
    phi = Rat(Interval.everything(), EPS)
    w = tw(("a", 0), ("b", "1/2"), ("a", 2))
    assert [evaluate(phi, w, i) for i in (1, 2, 3)] == [False, False, True]


def test_single_letter_membership():
    assert language_membership(Prop("a"), tw(("ab", 0)))
    assert not language_membership(Prop("a"), tw(("b", 0)))


def test_until_examples():
    a, b = Prop("a"), Prop("b")
    phi, psi = until(a, Interval.open(0, 1), b), desugar_until(a, Interval.open(0, 1), b)
    assert format_formula(phi) == "FRat[(0,1)]{a*}(b)"
    for w, want in [(tw(("a", 0), ("a", "1/4"), ("b", "1/2")), True),
                    (tw(("a", 0), ("c", "1/4"), ("b", "1/2")), False),
                    (tw(("a", 0), ("b", 3)), False)]:
        assert evaluate(phi, w) is want
        assert evaluate(psi, w) is want


def test_fixpoints_need_the_fixpoint_evaluator():
    with pytest.raises(PreconditionError):
        evaluate(corpus_formula("mu_chain"), corpus_word("mu_chain_four"))


def test_truth_table_matches_pointwise_evaluation():
    phi = corpus_formula("nested_rat")
    w = corpus_word("nested_rat_yes")
    assert truth_table(phi, w) == [evaluate(phi, w, i) for i in range(1, len(w) + 1)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_negation_flips_every_verdict(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, "ab", max_md=2)
    for w in random_words(rng, "ab", 10):
        assert evaluate(neg(phi), w) == (not evaluate(phi, w))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_urat_is_an_frat(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, "ab", max_md=1, fragment="ratmtl")
    if not isinstance(phi, URat):
        phi = URat(Interval.parse("[0,2)"), parse_regex("a*"), phi, Prop("b"))
    for w in random_words(rng, "ab", 10):
        assert evaluate(urat_to_frat(phi), w) == evaluate(phi, w)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_printing_round_trips(seed):
    phi = random_formula(random.Random(seed), "abc", max_md=2)
    assert parse_formula(format_formula(phi)) == phi
