import random

import pytest
from conftest import corpus_formula, corpus_word
from hypothesis import given, settings, strategies as st

from oneclock.ata import accepts
from oneclock.compiler import compile_formula, compile_frat, compile_rat_base
from oneclock.core import Interval, tw
from oneclock.errors import PreconditionError
from oneclock.generators import random_formula, random_words
from oneclock.logic import EPS, evaluate, parse_formula, parse_regex
from oneclock.structure import check_cd, check_lfr

WINDOW = Interval.parse("[1,2)")


def test_empty_regex_base():
    C = compile_rat_base(WINDOW, EPS, "ab")
    assert check_lfr(C)
    assert accepts(C, tw(("a", 0), ("b", "1/2"), ("a", "5/2")))
    assert not accepts(C, tw(("a", 0), ("b", "3/2")))


def test_rat_base_matches_evaluation():
    regex = parse_regex("a.b*")
    C = compile_rat_base(WINDOW, regex, "ab")
    phi = parse_formula("Rat[[1,2)]{a.b*}")
    assert check_lfr(C)
    for w in random_words(random.Random(11), "ab", 200):
        assert accepts(C, w) == evaluate(phi, w)


def test_rat_base_needs_propositional_atoms():
    with pytest.raises(PreconditionError):
        compile_rat_base(WINDOW, parse_regex("<Rat[(0,1)]{a}>"), "ab")


@pytest.mark.parametrize("name,words", [
    ("pair_until", ["pair_until_yes", "pair_until_no"]),
    ("nested_rat", ["nested_rat_yes", "nested_rat_no"]),
])
def test_corpus_formulas_compile(name, words):
    phi = corpus_formula(name)
    props = sorted(set().union(*(corpus_word(w).alphabet() for w in words)))
    A = compile_formula(phi, props)
    assert check_lfr(A)
    for w in words:
        assert accepts(A, corpus_word(w)) == evaluate(phi, corpus_word(w))


def test_fixpoints_are_routed_elsewhere():
    with pytest.raises(PreconditionError):
        compile_formula(corpus_formula("mu_chain"), "ab")


def test_frat_compiler_rejects_rat():
    with pytest.raises(PreconditionError):
        compile_frat(parse_formula("Rat[(0,1)]{a}"), "ab")


def test_until_compiles_to_cd_automaton():
    phi = parse_formula("U[(0,1)](a, b)")
    A = compile_frat(phi, "ab")
    assert check_cd(A)[0] and check_lfr(A)
    assert accepts(A, tw(("a", 0), ("a", "1/4"), ("b", "1/2")))
    assert not accepts(A, tw(("a", 0), ("a", "1/4"), ("b", "1")))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_compile_agrees_with_evaluation(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, "ab", max_md=2)
    A = compile_formula(phi, "ab")
    assert check_lfr(A)
    for w in random_words(rng, "ab", 25):
        assert accepts(A, w) == evaluate(phi, w)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_compile_frat_agrees_and_stays_cd(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, "ab", max_md=2, fragment="fratmtl")
    A = compile_frat(phi, "ab")
    assert check_cd(A)[0] and check_lfr(A)
    for w in random_words(rng, "ab", 25):
        assert accepts(A, w) == evaluate(phi, w)
