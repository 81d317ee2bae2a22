"""RatMTL syntax, parsing, printing and pointwise evaluation over timed words.

Fixpoint nodes (Var, Mu, Nu) live in the same tree so that one parser and one
evaluator serve both the plain and the recursive logic.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

from .core import Interval, TimedWord, interval_contains
from .errors import InputError, PreconditionError, UnguardedError
from .node import Node
from .parsing import Scanner


class Formula(Node):
    __slots__ = ()

    def __str__(self):
        return format_formula(self)

    def __repr__(self):
        return f"<{format_formula(self)}>"


@dataclass(frozen=True, eq=False, repr=False)
class Prop(Formula):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class TrueF(Formula):
    pass


TRUE = TrueF()


@dataclass(frozen=True, eq=False, repr=False)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Rat(Formula):
    interval: Interval
    regex: "Regex"

    def children(self):
        return tuple(self.regex.atoms())


@dataclass(frozen=True, eq=False, repr=False)
class FRat(Formula):
    interval: Interval
    regex: "Regex"
    arg: Formula

    def children(self):
        return tuple(self.regex.atoms()) + (self.arg,)


@dataclass(frozen=True, eq=False, repr=False)
class URat(Formula):
    interval: Interval
    regex: "Regex"
    left: Formula
    right: Formula

    def children(self):
        return tuple(self.regex.atoms()) + (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Var(Formula):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class Mu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False, repr=False)
class Nu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


FALSE = Not(TRUE)
MODALITIES = (Rat, FRat, URat)


# regexes -----------------------------------------------------------------


class Regex(Node):
    __slots__ = ()

    def atoms(self):
        seen = {}
        for a in self._atoms():
            seen.setdefault(a, None)
        return list(seen)

    def _atoms(self):
        return iter(())

    def __str__(self):
        return format_regex(self)


@dataclass(frozen=True, eq=False)
class Epsilon(Regex):
    pass


EPS = Epsilon()


@dataclass(frozen=True, eq=False)
class Atom(Regex):
    formula: Formula

    def _atoms(self):
        yield self.formula


@dataclass(frozen=True, eq=False)
class Concat(Regex):
    left: Regex
    right: Regex

    def _atoms(self):
        yield from self.left._atoms()
        yield from self.right._atoms()


@dataclass(frozen=True, eq=False)
class Union(Regex):
    left: Regex
    right: Regex

    def _atoms(self):
        yield from self.left._atoms()
        yield from self.right._atoms()


@dataclass(frozen=True, eq=False)
class Star(Regex):
    arg: Regex

    def _atoms(self):
        yield from self.arg._atoms()


def concat(*parts) -> Optional[Regex]:
    """Concatenation with ε/∅ simplification; None stands for the empty language."""
    out = None
    for p in parts:
        if p is None:
            return None
        if isinstance(p, Epsilon):
            continue
        out = p if out is None else Concat(out, p)
    return EPS if out is None else out


def union(*parts) -> Optional[Regex]:
    out = None
    for p in parts:
        if p is None or p == out:
            continue
        out = p if out is None else Union(out, p)
    return out


def star(p: Optional[Regex]) -> Regex:
    if p is None or isinstance(p, Epsilon):
        return EPS
    if isinstance(p, Star):
        return p
    return Star(p)


def plus(p: Optional[Regex]) -> Optional[Regex]:
    if p is None:
        return None
    return concat(p, star(p))


def map_regex(r: Regex, fn) -> Regex:
    """Rebuild ``r`` with every atom formula replaced by fn(formula)."""
    if isinstance(r, Atom):
        return Atom(fn(r.formula))
    if isinstance(r, Concat):
        return Concat(map_regex(r.left, fn), map_regex(r.right, fn))
    if isinstance(r, Union):
        return Union(map_regex(r.left, fn), map_regex(r.right, fn))
    if isinstance(r, Star):
        return Star(map_regex(r.arg, fn))
    return r


def nullable(r: Regex) -> bool:
    if isinstance(r, (Epsilon, Star)):
        return True
    if isinstance(r, Atom):
        return False
    if isinstance(r, Concat):
        return nullable(r.left) and nullable(r.right)
    return nullable(r.left) or nullable(r.right)


# constructors ------------------------------------------------------------


def neg(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


def land(*fs) -> Formula:
    out = None
    for f in fs:
        if f == TRUE:
            continue
        if f == FALSE:
            return FALSE
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


def lor(*fs) -> Formula:
    out = None
    for f in fs:
        if f == FALSE:
            continue
        if f == TRUE:
            return TRUE
        out = f if out is None else Or(out, f)
    return FALSE if out is None else out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def until(left: Formula, interval: Interval, right: Formula) -> Formula:
    """MTL until as a forward rational modality."""
    return desugar_until(left, interval, right)


def desugar_until(left: Formula, interval: Interval, right: Formula) -> Formula:
    return FRat(interval, Star(Atom(left)), right)


def globally_rat(interval, regex, arg):
    return Not(FRat(interval, regex, Not(arg)))


def last() -> Formula:
    """True exactly at the final position."""
    return Rat(Interval.everything(), EPS)


def box_false() -> Formula:
    """No future position exists, written with a forward modality only."""
    return Not(FRat(Interval.everything(), Star(Atom(TRUE)), TRUE))


# traversal ---------------------------------------------------------------


def walk(f: Formula):
    """Every distinct subformula node, children before parents (DAG-aware)."""
    seen = set()
    order = []
    stack = [(f, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for c in node.children():
            if id(c) not in seen:
                stack.append((c, False))
    return order


def props_of(f: Formula) -> frozenset:
    return frozenset(n.name for n in walk(f) if isinstance(n, Prop))


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Var):
        return frozenset([f.name])
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.body) - {f.var}
    out = frozenset()
    for c in f.children():
        out |= free_vars(c)
    return out


def modal_depth(f: Formula) -> int:
    memo = {}
    for node in walk(f):
        kids = [memo[id(c)] for c in node.children()]
        top = max(kids, default=0)
        memo[id(node)] = top + 1 if isinstance(node, MODALITIES) else top
    return memo[id(f)]


def is_propositional(f: Formula) -> bool:
    return all(not isinstance(n, MODALITIES + (Var, Mu, Nu)) for n in walk(f))


def has_fixpoints(f: Formula) -> bool:
    return any(isinstance(n, (Var, Mu, Nu)) for n in walk(f))


def substitute(f: Formula, mapping: dict, memo=None) -> Formula:
    """Replace Prop/Var leaves by name, sharing rebuilt subtrees."""
    memo = {} if memo is None else memo
    key = id(f)
    if key in memo:
        return memo[key]
    if isinstance(f, (Prop, Var)):
        out = mapping.get(f.name, f)
    elif isinstance(f, TrueF):
        out = f
    elif isinstance(f, Not):
        out = Not(substitute(f.arg, mapping, memo))
    elif isinstance(f, And):
        out = And(substitute(f.left, mapping, memo), substitute(f.right, mapping, memo))
    elif isinstance(f, Or):
        out = Or(substitute(f.left, mapping, memo), substitute(f.right, mapping, memo))
    elif isinstance(f, Rat):
        out = Rat(f.interval, map_regex(f.regex, lambda a: substitute(a, mapping, memo)))
    elif isinstance(f, FRat):
        out = FRat(f.interval, map_regex(f.regex, lambda a: substitute(a, mapping, memo)),
                   substitute(f.arg, mapping, memo))
    elif isinstance(f, URat):
        out = URat(f.interval, map_regex(f.regex, lambda a: substitute(a, mapping, memo)),
                   substitute(f.left, mapping, memo), substitute(f.right, mapping, memo))
    elif isinstance(f, (Mu, Nu)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        out = type(f)(f.var, substitute(f.body, inner))
    else:
        raise TypeError(f)
    memo[key] = out
    return out


def urat_to_frat(f: URat) -> FRat:
    """φ1 URat_{I,re} φ2 as FRat with every regex atom strengthened by φ1."""
    return FRat(f.interval, map_regex(f.regex, lambda a: land(a, f.left)), f.right)


# parsing -----------------------------------------------------------------

_KEYWORDS = {"true", "false", "Rat", "FRat", "URat", "U", "GRat", "mu", "nu", "eps"}


def parse_formula(text: str, allow_free_vars: bool = False) -> Formula:
    """Parse the concrete syntax; identifiers starting upper-case are recursion variables."""
    sc = Scanner(text)
    f = _Parser(sc, allow_free_vars).formula(frozenset())
    sc.finish()
    return f


def parse_regex(text: str) -> Regex:
    sc = Scanner(text)
    r = _Parser(sc, True).regex(frozenset())
    sc.finish()
    return r


class _Parser:
    def __init__(self, sc: Scanner, allow_free_vars: bool):
        self.sc = sc
        self.allow_free_vars = allow_free_vars

    def formula(self, bound):
        sc = self.sc
        word = sc.peek_word()
        if word in ("mu", "nu"):
            sc.accept_word(word)
            start = sc.pos
            var = sc.ident("recursion variable")
            if not var[0].isupper():
                raise sc.error("recursion variables start with an upper-case letter", start)
            sc.expect(".")
            body = self.formula(bound | {var})
            return (Mu if word == "mu" else Nu)(var, body)
        left = self.disjunction(bound)
        if sc.accept("->"):
            right = self.formula(bound)
            return implies(left, right)
        if sc.accept("<->"):
            right = self.formula(bound)
            return And(implies(left, right), implies(right, left))
        return left

    def disjunction(self, bound):
        f = self.conjunction(bound)
        while self.sc.peek("|"):
            self.sc.accept("|")
            f = Or(f, self.conjunction(bound))
        return f

    def conjunction(self, bound):
        f = self.unary(bound)
        while self.sc.accept("&"):
            f = And(f, self.unary(bound))
        return f

    def unary(self, bound):
        sc = self.sc
        if sc.accept("~"):
            return Not(self.unary(bound))
        if sc.accept("("):
            f = self.formula(bound)
            sc.expect(")")
            return f
        if sc.peek_word() in ("mu", "nu"):
            return self.formula(bound)
        start = sc.pos
        word = sc.ident("formula")
        if word == "true":
            return TRUE
        if word == "false":
            return FALSE
        if word in ("Rat", "FRat", "URat", "GRat"):
            sc.expect("[")
            interval = sc.interval()
            sc.expect("]")
            sc.expect("{")
            regex = self.regex(bound)
            sc.expect("}")
            if word == "Rat":
                return Rat(interval, regex)
            sc.expect("(")
            first = self.formula(bound)
            if word == "URat":
                sc.expect(",")
                second = self.formula(bound)
                sc.expect(")")
                return URat(interval, regex, first, second)
            sc.expect(")")
            return FRat(interval, regex, first) if word == "FRat" else globally_rat(interval, regex, first)
        if word == "U":
            sc.expect("[")
            interval = sc.interval()
            sc.expect("]")
            sc.expect("(")
            first = self.formula(bound)
            sc.expect(",")
            second = self.formula(bound)
            sc.expect(")")
            return desugar_until(first, interval, second)
        return self.leaf(word, bound, start)

    def leaf(self, word, bound, start):
        if word in _KEYWORDS:
            raise self.sc.error(f"unexpected keyword {word!r}", start)
        if word[0].isupper():
            if word not in bound and not self.allow_free_vars:
                raise self.sc.error(f"unbound fixpoint variable {word!r}", start)
            return Var(word)
        return Prop(word)

    def regex(self, bound):
        r = self.regex_concat(bound)
        while self.sc.accept("+"):
            r = Union(r, self.regex_concat(bound))
        return r

    def regex_concat(self, bound):
        r = self.regex_star(bound)
        while self.sc.accept("."):
            r = Concat(r, self.regex_star(bound))
        return r

    def regex_star(self, bound):
        r = self.regex_base(bound)
        while self.sc.accept("*"):
            r = Star(r)
        return r

    def regex_base(self, bound):
        sc = self.sc
        if sc.accept("("):
            r = self.regex(bound)
            sc.expect(")")
            return r
        if sc.accept("<"):
            f = self.formula(bound)
            sc.expect(">")
            return Atom(f)
        start = sc.pos
        word = sc.ident("regex")
        if word == "eps":
            return EPS
        if word == "true":
            return Atom(TRUE)
        return Atom(self.leaf(word, bound, start))


# printing ----------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def format_formula(f: Formula) -> str:
    return _fmt(f)


def _fmt(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Var):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Not):
        if f.arg == TRUE:
            return "false"
        return "~" + _fmt(f.arg, 3)
    if isinstance(f, (And, Or)):
        prec = _PREC[type(f)]
        op = " & " if isinstance(f, And) else " | "
        text = _fmt(f.left, prec) + op + _fmt(f.right, prec + 1)
        return f"({text})" if ctx > prec else text
    if isinstance(f, Rat):
        return f"Rat[{f.interval}]{{{format_regex(f.regex)}}}"
    if isinstance(f, FRat):
        return f"FRat[{f.interval}]{{{format_regex(f.regex)}}}({_fmt(f.arg)})"
    if isinstance(f, URat):
        return f"URat[{f.interval}]{{{format_regex(f.regex)}}}({_fmt(f.left)}, {_fmt(f.right)})"
    if isinstance(f, (Mu, Nu)):
        text = f"{'mu' if isinstance(f, Mu) else 'nu'} {f.var}. {_fmt(f.body)}"
        return f"({text})" if ctx > 0 else text
    raise TypeError(f)


def format_regex(r: Regex, ctx: int = 0) -> str:
    if isinstance(r, Epsilon):
        return "eps"
    if isinstance(r, Atom):
        a = r.formula
        if isinstance(a, (Prop, Var)) and a.name not in _KEYWORDS:
            return a.name
        if a == TRUE:
            return "true"
        return f"<{_fmt(a)}>"
    if isinstance(r, Union):
        text = format_regex(r.left, 1) + " + " + format_regex(r.right, 2)
        return f"({text})" if ctx > 1 else text
    if isinstance(r, Concat):
        text = format_regex(r.left, 2) + "." + format_regex(r.right, 3)
        return f"({text})" if ctx > 2 else text
    if isinstance(r, Star):
        return format_regex(r.arg, 4) + "*"
    raise TypeError(r)


# Glushkov automata -------------------------------------------------------


class Glushkov:
    """Position automaton of a regex: states are atom occurrences plus a start state 0."""

    def __init__(self, regex: Regex):
        self.symbols = [None]  # position -> atom formula
        self.follow = {}
        first, last, null = self._build(regex)
        self.first = first
        self.accepting = frozenset(last | ({0} if null else set()))
        self.nullable = null

    def _build(self, r):
        if isinstance(r, Epsilon):
            return set(), set(), True
        if isinstance(r, Atom):
            p = len(self.symbols)
            self.symbols.append(r.formula)
            self.follow[p] = set()
            return {p}, {p}, False
        if isinstance(r, Union):
            f1, l1, n1 = self._build(r.left)
            f2, l2, n2 = self._build(r.right)
            return f1 | f2, l1 | l2, n1 or n2
        if isinstance(r, Concat):
            f1, l1, n1 = self._build(r.left)
            f2, l2, n2 = self._build(r.right)
            for p in l1:
                self.follow[p] |= f2
            return (f1 | f2 if n1 else f1), (l1 | l2 if n2 else l2), n1 and n2
        if isinstance(r, Star):
            f1, l1, _ = self._build(r.arg)
            for p in l1:
                self.follow[p] |= f1
            return f1, l1, True
        raise TypeError(r)

    def successors(self, state):
        return self.first if state == 0 else self.follow[state]

    def step(self, states, holds):
        """Advance a state set by one position; ``holds(atom)`` says which atoms are true there."""
        out = set()
        for s in states:
            for p in self.successors(s):
                if p not in out and holds(self.symbols[p]):
                    out.add(p)
        return out

    def accepts_states(self, states) -> bool:
        return bool(self.accepting & set(states))


_GLUSHKOV_CACHE = {}


def glushkov(regex: Regex) -> Glushkov:
    g = _GLUSHKOV_CACHE.get(regex)
    if g is None:
        g = Glushkov(regex)
        if len(_GLUSHKOV_CACHE) > 50_000:
            _GLUSHKOV_CACHE.clear()
        _GLUSHKOV_CACHE[regex] = g
    return g


def single_match(regex: Regex, labels) -> bool:
    """Does some single-selection of ``labels`` (a list of sets of true atoms) lie in L(regex)?"""
    g = glushkov(regex)
    states = {0}
    for label in labels:
        states = g.step(states, lambda a: a in label)
        if not states:
            return False
    return g.accepts_states(states)


# evaluation --------------------------------------------------------------


class Evaluator:
    """Lazy memoised evaluation of a formula DAG at word positions (1-based).

    ``bodies`` maps recursion variables to their defining formulas; a Var is
    evaluated by evaluating its body at the same position.  Guarded bodies only
    look at strictly later positions, so recursion terminates; a cycle through
    the same (node, position) pair is reported as unguarded recursion.
    ``labels`` optionally fixes variable values per position instead.
    """

    def __init__(self, word: TimedWord, bodies=None, labels=None, urat_direct=True):
        self.word = word
        self.n = len(word)
        self.props = word.props
        self.times = word.times
        self.bodies = bodies or {}
        self.labels = labels
        self.urat_direct = urat_direct
        self.memo = {}
        self.busy = set()
        self._alive = {}
        self._converted = {}

    def value(self, f: Formula, i: int) -> bool:
        key = (id(f), i)
        try:
            return self.memo[key]
        except KeyError:
            pass
        if key in self.busy:
            raise UnguardedError(f"unguarded recursion through {format_formula(f)} at position {i}")
        self.busy.add(key)
        try:
            v = self._compute(f, i)
        finally:
            self.busy.discard(key)
        self.memo[key] = v
        # keep the node alive so its id is not reused while memoised
        self._alive.setdefault(id(f), f)
        return v

    def _compute(self, f, i):
        if isinstance(f, Prop):
            return f.name in self.props[i - 1]
        if isinstance(f, TrueF):
            return True
        if isinstance(f, Not):
            return not self.value(f.arg, i)
        if isinstance(f, And):
            return self.value(f.left, i) and self.value(f.right, i)
        if isinstance(f, Or):
            return self.value(f.left, i) or self.value(f.right, i)
        if isinstance(f, Rat):
            return self._rat(f, i)
        if isinstance(f, FRat):
            return self._frat(f.interval, f.regex, f.arg, i, None)
        if isinstance(f, URat):
            if self.urat_direct:
                return self._frat(f.interval, f.regex, f.right, i, f.left)
            conv = self._converted.get(id(f))
            if conv is None:
                conv = self._converted[id(f)] = urat_to_frat(f)
            return self.value(conv, i)
        if isinstance(f, Var):
            if self.labels is not None:
                return f.name in self.labels[i - 1]
            body = self.bodies.get(f.name)
            if body is None:
                raise PreconditionError(f"no definition for recursion variable {f.name}")
            return self.value(body, i)
        if isinstance(f, (Mu, Nu)):
            raise PreconditionError("fixpoint binders must be evaluated through the fixpoint module")
        raise TypeError(f)

    def window(self, interval, i):
        """Positions k > i whose distance from position i lies in the interval."""
        base = self.times[i - 1]
        ks = []
        for k in range(i + 1, self.n + 1):
            d = self.times[k - 1] - base
            if interval_contains(interval, d):
                ks.append(k)
            elif interval.hi is not None and d > interval.hi:
                break
        return ks

    def _holds(self, k):
        return lambda atom: self.value(atom, k)

    def _rat(self, f, i):
        g = glushkov(f.regex)
        states = {0}
        for k in self.window(f.interval, i):
            states = g.step(states, self._holds(k))
            if not states:
                return False
        return g.accepts_states(states)

    def _frat(self, interval, regex, target, i, guard):
        g = glushkov(regex)
        base = self.times[i - 1]
        states = {0}
        for j in range(i + 1, self.n + 1):
            d = self.times[j - 1] - base
            if interval.hi is not None and (d > interval.hi or (d == interval.hi and not interval.hi_closed)):
                return False
            if interval_contains(interval, d) and g.accepts_states(states) and self.value(target, j):
                return True
            if guard is not None and not self.value(guard, j):
                return False
            states = g.step(states, self._holds(j))
            if not states:
                return False
        return False


def evaluate(f: Formula, word: TimedWord, i: int = 1, **kw) -> bool:
    if not 1 <= i <= len(word):
        raise InputError(f"position {i} outside 1..{len(word)}")
    if any(isinstance(n, (Mu, Nu)) for n in walk(f)):
        raise PreconditionError("fixpoint formulas are evaluated through the fixpoint module")
    return Evaluator(word, **kw).value(f, i)


eval_formula = evaluate


def language_membership(f: Formula, word: TimedWord) -> bool:
    return evaluate(f, word, 1)


def truth_table(f: Formula, word: TimedWord) -> list:
    ev = Evaluator(word)
    return [ev.value(f, i) for i in range(1, len(word) + 1)]


sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
