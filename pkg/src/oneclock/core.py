"""Exact timestamps, intervals, clock regions and timed words."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InputError

Letter = frozenset  # a non-empty frozenset of proposition names


def to_rational(value) -> Fraction:
    """Parse an int, Fraction or string ("3/10", "0.3", "2") exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a timestamp: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # floats are accepted only through their shortest decimal repr
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"\d*\.\d+|\d+(\.\d*)?|\d+/\d+", text):
            raise InputError(f"not a non-negative rational: {value!r}")
        return Fraction(text)
    raise InputError(f"not a timestamp: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Interval:
    """An interval of the non-negative reals with integer (or infinite) endpoints.

    ``hi is None`` stands for infinity.
    """

    lo: int
    lo_closed: bool
    hi: Optional[int]
    hi_closed: bool

    def __post_init__(self):
        if self.lo < 0 or (self.hi is not None and self.hi < 0):
            raise InputError(f"negative endpoint in interval {self}")
        if self.hi is None and self.hi_closed:
            raise InputError("infinity cannot be a closed endpoint")
        if self.hi is not None:
            if self.hi < self.lo:
                raise InputError(f"empty interval {self}")
            if self.hi == self.lo and not (self.lo_closed and self.hi_closed):
                raise InputError(f"empty interval {self}")

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, True, hi, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, False, hi, False)

    @classmethod
    def point(cls, c):
        return cls(c, True, c, True)

    @classmethod
    def at_least(cls, lo, closed=True):
        return cls(lo, closed, None, False)

    @classmethod
    def everything(cls):
        return cls(0, True, None, False)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        m = re.fullmatch(r"\s*([\[(])\s*(\d+)\s*,\s*(\d+|inf)\s*([\])])\s*", text)
        if not m:
            raise InputError(f"bad interval {text!r}")
        hi = None if m.group(3) == "inf" else int(m.group(3))
        return cls(int(m.group(2)), m.group(1) == "[", hi, m.group(4) == "]")

    def __contains__(self, t) -> bool:
        return interval_contains(self, t)

    def is_everything(self) -> bool:
        return self.lo == 0 and self.lo_closed and self.hi is None

    def endpoints(self):
        return [self.lo] + ([] if self.hi is None else [self.hi])

    def below(self) -> Optional["Interval"]:
        """The part of [0, inf) strictly below this interval, or None."""
        if self.lo == 0 and self.lo_closed:
            return None
        return Interval(0, True, self.lo, not self.lo_closed)

    def above(self) -> Optional["Interval"]:
        """The part of [0, inf) strictly above this interval, or None."""
        if self.hi is None:
            return None
        return Interval(self.hi, not self.hi_closed, None, False)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        if (self.lo, not self.lo_closed) >= (other.lo, not other.lo_closed):
            lo, lo_closed = self.lo, self.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        his = [i for i in (self, other) if i.hi is not None]
        if not his:
            hi, hi_closed = None, False
        else:
            best = min(his, key=lambda i: (i.hi, i.hi_closed))
            hi, hi_closed = best.hi, best.hi_closed
        if hi is not None and (hi < lo or (hi == lo and not (lo_closed and hi_closed))):
            return None
        return Interval(lo, lo_closed, hi, hi_closed)

    def __str__(self):
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{self.lo},{hi}{']' if self.hi_closed else ')'}"


def interval_contains(interval: Interval, t) -> bool:
    if t < interval.lo or (t == interval.lo and not interval.lo_closed):
        return False
    if interval.hi is None:
        return True
    return t < interval.hi or (t == interval.hi and interval.hi_closed)


def interval_complement(interval: Interval) -> set:
    parts = set()
    below, above = interval.below(), interval.above()
    if below is not None:
        parts.add(below)
    if above is not None:
        parts.add(above)
    return parts


@dataclass(frozen=True)
class Region:
    """A clock region: point(c), open(c, c+1) or tail(c, inf)."""

    c: int
    kind: str  # "point" | "open" | "tail"

    def __post_init__(self):
        if self.kind not in ("point", "open", "tail"):
            raise InputError(f"bad region kind {self.kind!r}")

    @property
    def key(self):
        return (self.c, 0 if self.kind == "point" else 1)

    def __lt__(self, other):
        return self.key < other.key

    def __le__(self, other):
        return self.key <= other.key

    def as_interval(self) -> Interval:
        if self.kind == "point":
            return Interval.point(self.c)
        if self.kind == "open":
            return Interval.open(self.c, self.c + 1)
        return Interval(self.c, False, None, False)

    def within(self, interval: Interval) -> bool:
        """Whether the region lies inside ``interval``.

        Only meaningful when the interval's endpoints are at most the c_max the
        region was built for, in which case the region is inside or disjoint.
        """
        if self.kind == "point":
            return interval_contains(interval, self.c)
        return interval_contains(interval, self.c + Fraction(1, 2))

    def __str__(self):
        if self.kind == "point":
            return f"pt{self.c}"
        if self.kind == "open":
            return f"({self.c},{self.c + 1})"
        return f"({self.c},inf)"

    @classmethod
    def parse(cls, text: str) -> "Region":
        m = re.fullmatch(r"pt(\d+)", text)
        if m:
            return cls(int(m.group(1)), "point")
        m = re.fullmatch(r"\((\d+),(\d+|inf)\)", text.replace(" ", ""))
        if m:
            return cls(int(m.group(1)), "tail" if m.group(2) == "inf" else "open")
        raise InputError(f"bad region {text!r}")


def all_regions(c_max: int) -> list:
    """The 2*c_max+2 regions in increasing order."""
    out = []
    for c in range(c_max + 1):
        out.append(Region(c, "point"))
        out.append(Region(c, "open") if c < c_max else Region(c, "tail"))
    return out


def region_of(t, c_max: int) -> Region:
    t = to_rational(t)
    if t < 0:
        raise ValueError(f"negative time {t}")
    if t > c_max:
        return Region(c_max, "tail")
    if t.denominator == 1:
        return Region(int(t), "point")
    return Region(t.numerator // t.denominator, "open")


def c_max_of(intervals: Iterable[Interval]) -> int:
    best = 0
    for i in intervals:
        for e in i.endpoints():
            best = max(best, e)
    return best


class TimedWord(Sequence):
    """A finite timed word: letters are (non-empty prop set, timestamp) pairs."""

    __slots__ = ("_letters",)

    def __init__(self, letters: Iterable):
        items = []
        for props, t in letters:
            props = frozenset(props)
            t = to_rational(t)
            if not props:
                raise InputError("empty proposition set in timed word")
            if items and t < items[-1][1]:
                raise InputError("timestamps must be weakly increasing")
            items.append((props, t))
        if not items:
            raise InputError("timed words are non-empty")
        if items[0][1] != 0:
            raise InputError("first timestamp must be 0")
        self._letters = tuple(items)

    def __len__(self):
        return len(self._letters)

    def __getitem__(self, i):
        return self._letters[i]

    def __iter__(self) -> Iterator:
        return iter(self._letters)

    def __eq__(self, other):
        return isinstance(other, TimedWord) and self._letters == other._letters

    def __hash__(self):
        return hash(self._letters)

    @property
    def props(self):
        return [p for p, _ in self._letters]

    @property
    def times(self):
        return [t for _, t in self._letters]

    def alphabet(self) -> frozenset:
        return frozenset().union(*self.props)

    def suffix(self, i: int) -> "TimedWord":
        """The suffix starting at 1-based position i, re-timed to start at 0."""
        base = self._letters[i - 1][1]
        return TimedWord((p, t - base) for p, t in self._letters[i - 1:])

    def to_json(self):
        return [{"t": format_rational(t), "props": sorted(p)} for p, t in self._letters]

    @classmethod
    def from_json(cls, data) -> "TimedWord":
        if not isinstance(data, list):
            raise InputError("timed word JSON must be an array")
        try:
            return cls((entry["props"], entry["t"]) for entry in data)
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad timed word entry: {exc}") from None

    def __repr__(self):
        return "TimedWord(" + " ".join(
            "({" + ",".join(sorted(p)) + "}," + format_rational(t) + ")" for p, t in self._letters) + ")"


def load_word(path) -> TimedWord:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON in {path}: {exc.msg}", exc.lineno, exc.colno) from None
    return TimedWord.from_json(data)


def tw(*pairs) -> TimedWord:
    """Shorthand: tw(("a", 0), ("ab", "3/10")) with props given as strings or sets."""
    out = []
    for props, t in pairs:
        if isinstance(props, str):
            props = props.split(",") if "," in props else list(props)
        out.append((props, t))
    return TimedWord(out)


RegionWord = tuple  # tuple of (frozenset props, Region)


def region_word_of(word: TimedWord, c_max: int) -> RegionWord:
    return tuple((p, region_of(t, c_max)) for p, t in word)


def is_good_region_word(w) -> bool:
    if not w:
        return False
    if w[0][1] != Region(0, "point"):
        return False
    return all(a[1] <= b[1] for a, b in zip(w, w[1:]))


def nonempty_subsets(alphabet) -> list:
    """All non-empty subsets of ``alphabet`` as frozensets, in a stable order."""
    items = sorted(alphabet)
    out = []
    for mask in range(1, 1 << len(items)):
        out.append(frozenset(a for k, a in enumerate(items) if mask >> k & 1))
    return out


def all_subsets(items) -> list:
    items = sorted(items)
    return [frozenset(a for k, a in enumerate(items) if mask >> k & 1)
            for mask in range(1 << len(items))]
