from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oneclock.core import (Interval, Region, TimedWord, all_regions, interval_complement,
                           interval_contains, is_good_region_word, region_of, region_word_of, tw)
from oneclock.errors import InputError

PT0, PT1 = Region(0, "point"), Region(1, "point")
OPEN01 = Region(0, "open")


def test_region_of_fixed_values():
    assert region_of(0, 2) == PT0
    assert region_of(Fraction(7, 10), 1) == OPEN01
    assert region_of(Fraction(5, 2), 2) == Region(2, "tail")
    assert region_of(2, 2) == Region(2, "point")


def test_region_of_negative_time():
    with pytest.raises(ValueError):
        region_of(-1, 2)


def test_region_word_of():
    a, b = frozenset("a"), frozenset("b")
    assert region_word_of(tw(("a", 0), ("b", "7/10")), 1) == ((a, PT0), (b, OPEN01))
    assert region_word_of(tw(("a", 0)), 3) == ((a, PT0),)
    assert region_word_of(tw(("a", 0), ("a", 1), ("b", "3/2")), 1) == (
        (a, PT0), (a, PT1), (b, Region(1, "tail")))


def test_good_region_words():
    a, b, c = frozenset("a"), frozenset("b"), frozenset("c")
    assert is_good_region_word(((a, PT0), (b, PT0)))
    assert not is_good_region_word(((a, OPEN01),))
    assert not is_good_region_word(((a, PT0), (b, PT1), (c, OPEN01)))
    assert not is_good_region_word(())


def test_interval_contains():
    assert interval_contains(Interval.parse("[1,2)"), 1)
    assert not interval_contains(Interval.parse("[1,2)"), 2)
    assert not interval_contains(Interval.parse("(0,inf)"), 0)


def test_interval_complement():
    assert interval_complement(Interval.parse("[1,2)")) == {Interval.parse("[0,1)"), Interval.parse("[2,inf)")}
    assert interval_complement(Interval.parse("[0,inf)")) == set()
    assert interval_complement(Interval.parse("(1,2)")) == {Interval.parse("[0,1]"), Interval.parse("[2,inf)")}


@pytest.mark.parametrize("text", ["(1,1)", "[2,1]", "[1,inf]", "[1,2", "(-1,2)"])
def test_bad_intervals(text):
    with pytest.raises(InputError):
        Interval.parse(text)


def test_timed_word_validation():
    with pytest.raises(InputError):
        tw(("a", 1))
    with pytest.raises(InputError):
        tw(("a", 0), ("b", 2), ("a", 1))
    with pytest.raises(InputError):
        TimedWord([(set(), 0)])
    with pytest.raises(InputError):
        TimedWord([])


def test_word_json_round_trip():
    w = tw(("ab", 0), ("b", "1/3"), ("a", 2))
    assert TimedWord.from_json(w.to_json()) == w
    assert w.suffix(2).times == [0, Fraction(5, 3)]


intervals = st.builds(
    lambda lo, width, lc, hc, inf: Interval(lo, lc or width == 0, None if inf else lo + width,
                                            False if inf else (hc or width == 0)),
    st.integers(0, 4), st.integers(0, 3), st.booleans(), st.booleans(), st.booleans())
times = st.fractions(min_value=0, max_value=8, max_denominator=12)


@given(intervals, times)
def test_complement_partitions_the_line(interval, t):
    inside = interval_contains(interval, t)
    hits = sum(interval_contains(j, t) for j in interval_complement(interval))
    assert hits == (0 if inside else 1)


@given(st.integers(0, 4), times)
def test_region_of_is_the_unique_containing_region(c_max, t):
    r = region_of(t, c_max)
    assert r in all_regions(c_max)
    assert interval_contains(r.as_interval(), t)
    assert sum(interval_contains(q.as_interval(), t) for q in all_regions(c_max)) == 1


@given(st.lists(times, min_size=1, max_size=6), st.integers(0, 3))
def test_region_words_of_timed_words_are_good(ts, c_max):
    ts = [Fraction(0)] + sorted(ts)
    w = TimedWord((["a"], t) for t in ts)
    assert is_good_region_word(region_word_of(w, c_max))
