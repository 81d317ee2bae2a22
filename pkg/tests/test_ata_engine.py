import random
from fractions import Fraction

import pytest
from conftest import corpus_ata, corpus_word
from hypothesis import given, settings, strategies as st

from oneclock.ata import (ATA, Loc, ResetLoc, accepts, complement, conjoin, disjoin, dualize,
                          format_tformula, make_ata, minimal_models, parse_tformula, to_cnf, to_dnf)
from oneclock.core import tw
from oneclock.errors import InputError, ResourceError
from oneclock.generators import random_lfr_ata, random_words


def test_to_dnf_distributes():
    f = parse_tformula("(s | x in [1,2]) & q")
    clauses = {frozenset(format_tformula(a) for a in c) for c in to_dnf(f)}
    assert clauses == {frozenset({"s", "q"}), frozenset({"x in [1,2]", "q"})}


def test_to_dnf_constants():
    assert to_dnf(parse_tformula("bot | s")) == {frozenset({Loc("s")})}
    assert to_dnf(parse_tformula("top")) == {frozenset()}
    assert to_dnf(parse_tformula("bot")) == set()


def test_to_dnf_drops_subsumed_and_empty_clock_clauses():
    assert to_dnf(parse_tformula("s | s & q")) == {frozenset({Loc("s")})}
    assert to_dnf(parse_tformula("x in [0,1) & x in (2,3)")) == set()


def test_cnf_is_dual_of_dnf():
    f = parse_tformula("s & q | r")
    assert {frozenset(c) for c in to_cnf(f)} == {frozenset({Loc("s"), Loc("r")}), frozenset({Loc("q"), Loc("r")})}


def test_minimal_models():
    f = parse_tformula("s0 & x.s1")
    assert minimal_models(f, Fraction(3, 2)) == {frozenset({("s0", Fraction(3, 2)), ("s1", 0)})}
    g = parse_tformula("x in (1,2)")
    assert minimal_models(g, Fraction(3, 2)) == {frozenset()}
    assert minimal_models(g, 3) == set()


def test_tformula_text_round_trip():
    for text in ["s0 & x.s1 | t2", "top", "bot", "x in [1,inf) & (p | x.q)"]:
        f = parse_tformula(text)
        assert parse_tformula(format_tformula(f)) == f


def test_po_automaton_verdicts():
    A = corpus_ata("po")
    assert accepts(A, tw(("a", 0), ("b", "1/2"), ("b", "3/2")))
    # a symbol exactly one time unit after a non-last {a}
    assert not accepts(A, corpus_word("po_reject"))
    assert not accepts(A, tw(("ab", 0)))


def test_missing_transition_rejects():
    A = make_ata("ab", ["s"], "s", ["s"], {"s": {"a": "s"}})
    assert accepts(A, tw(("a", 0), ("a", 1)))
    assert not accepts(A, tw(("a", 0), ("b", 1)))


def test_letter_outside_alphabet():
    A = make_ata("a", ["s"], "s", ["s"], {"s": {"a": "s"}})
    with pytest.raises(InputError):
        accepts(A, tw(("b", 0)))


def test_configuration_cap():
    A = make_ata("a", ["s", "p"], "s", ["s", "p"], {"s": {"a": "s & x.p | x.s"}, "p": {"a": "p"}})
    w = tw(*[("a", Fraction(k, 7)) for k in range(8)])
    assert accepts(A, w)
    with pytest.raises(ResourceError):
        accepts(A, w, cap=1)


def test_complement_of_universal_automaton():
    A = make_ata("ab", ["s"], "s", ["s"], {"s": {"_": "top"}})
    C = complement(A)
    for w in random_words(random.Random(1), "ab", 50):
        assert accepts(A, w)
        assert not accepts(C, w)


def test_complement_of_po_automaton():
    A = corpus_ata("po")
    C = complement(A)
    for w in random_words(random.Random(2), "ab", 100):
        assert accepts(C, w) != accepts(A, w)


def test_boolean_combinations_need_equal_alphabets():
    A = make_ata("ab", ["s"], "s", ["s"], {"s": {"_": "top"}})
    B = make_ata("a", ["s"], "s", ["s"], {"s": {"_": "top"}})
    with pytest.raises(InputError):
        conjoin(A, B)
    with pytest.raises(InputError):
        disjoin(A, B)


def test_ata_validation():
    with pytest.raises(InputError):
        ATA("a", ["s"], "q", [], {})
    with pytest.raises(InputError):
        make_ata("a", ["s"], "s", [], {"s": {"a": "p"}})
    with pytest.raises(InputError):
        make_ata("a", ["s"], "s", [], {"s": {"b": "s"}})


def test_json_round_trip():
    A = corpus_ata("three_islands")
    B = ATA.from_json(A.to_json())
    for w in random_words(random.Random(3), "ab", 50):
        assert accepts(A, w) == accepts(B, w)


def test_dualize_is_an_involution():
    f = parse_tformula("s & x.q | x in [1,2)")
    assert to_dnf(dualize(dualize(f))) == to_dnf(f)
    assert ResetLoc("q") in {a for c in to_dnf(dualize(f)) for a in c}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_boolean_operations_match_verdicts(seed):
    rng = random.Random(seed)
    A1, A2 = random_lfr_ata(rng, "ab"), random_lfr_ata(rng, "ab")
    both, either, neg = conjoin(A1, A2), disjoin(A1, A2), complement(A1)
    for w in random_words(rng, "ab", 15):
        v1, v2 = accepts(A1, w), accepts(A2, w)
        assert accepts(both, w) == (v1 and v2)
        assert accepts(either, w) == (v1 or v2)
        assert accepts(neg, w) == (not v1)
