"""Forward QkMSO: syntax, well-formedness, brute-force model checking and the
translations from RatMTL / FRatMTL."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Interval, TimedWord, interval_contains
from .errors import InputError, PreconditionError, ResourceError
from .logic import (And as LAnd, FRat, Formula, Glushkov, Mu, Not as LNot, Nu, Or as LOr, Prop,
                    Rat, TrueF, URat, Var, urat_to_frat, walk)
from .node import Node
from .parsing import Scanner

FO_CAP = 12
SO_CAP = 8


class QFormula(Node):
    __slots__ = ()

    def __str__(self):
        return format_qformula(self)


@dataclass(frozen=True, eq=False)
class QTrue(QFormula):
    pass


Q_TRUE = QTrue()


@dataclass(frozen=True, eq=False)
class Eq(QFormula):
    left: str
    right: str


@dataclass(frozen=True, eq=False)
class Lt(QFormula):
    left: str
    right: str


@dataclass(frozen=True, eq=False)
class Qa(QFormula):
    prop: str
    var: str


@dataclass(frozen=True, eq=False)
class In(QFormula):
    setvar: str
    var: str


@dataclass(frozen=True, eq=False)
class QNot(QFormula):
    arg: QFormula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class QAnd(QFormula):
    left: QFormula
    right: QFormula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class QOr(QFormula):
    left: QFormula
    right: QFormula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class ExistsFO(QFormula):
    """∃var (var > anchor) body; ``anchor=None`` ranges over every position."""
    var: str
    anchor: Optional[str]
    body: QFormula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class ForallFO(QFormula):
    var: str
    anchor: Optional[str]
    body: QFormula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class ExistsSO(QFormula):
    var: str
    body: QFormula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class TimeConstraint(QFormula):
    """A metric quantifier block anchored at ``anchor``.

    ``block`` is a tuple of (kind, var, interval) with kind "E" or "A"; each
    var ranges over positions a >= anchor with τ_a - τ_anchor in the interval.
    """
    anchor: str
    block: tuple
    body: QFormula

    def children(self):
        return (self.body,)


# smart constructors -------------------------------------------------------


def q_not(f):
    if isinstance(f, QNot):
        return f.arg
    return QNot(f)


Q_FALSE = QNot(Q_TRUE)


def q_and(*fs):
    out = None
    for f in fs:
        if f == Q_TRUE:
            continue
        if f == Q_FALSE:
            return Q_FALSE
        out = f if out is None else QAnd(out, f)
    return Q_TRUE if out is None else out


def q_or(*fs):
    out = None
    for f in fs:
        if f == Q_FALSE:
            continue
        if f == Q_TRUE:
            return Q_TRUE
        out = f if out is None else QOr(out, f)
    return Q_FALSE if out is None else out


def q_implies(a, b):
    return q_or(q_not(a), b)


def le(x, y):
    return q_or(Lt(x, y), Eq(x, y))


# free variables and metric depth -----------------------------------------


def free_fo(f: QFormula) -> frozenset:
    if isinstance(f, (Eq, Lt)):
        return frozenset({f.left, f.right})
    if isinstance(f, (Qa, In)):
        return frozenset({f.var})
    if isinstance(f, (ExistsFO, ForallFO)):
        out = free_fo(f.body) - {f.var}
        return out | ({f.anchor} if f.anchor else frozenset())
    if isinstance(f, TimeConstraint):
        return (free_fo(f.body) - {v for _, v, _ in f.block}) | {f.anchor}
    out = frozenset()
    for c in f.children():
        out |= free_fo(c)
    return out


def free_so(f: QFormula) -> frozenset:
    if isinstance(f, In):
        return frozenset({f.setvar})
    if isinstance(f, ExistsSO):
        return free_so(f.body) - {f.var}
    out = frozenset()
    for c in f.children():
        out |= free_so(c)
    return out


def metric_depth(f: QFormula) -> int:
    memo = {}
    for n in _walk(f):
        kids = max((memo[id(c)] for c in n.children()), default=0)
        memo[id(n)] = kids + 1 if isinstance(n, TimeConstraint) else kids
    return memo[id(f)]


def _walk(f):
    seen, order, stack = set(), [], [(f, False)]
    while stack:
        n, done = stack.pop()
        if done:
            order.append(n)
            continue
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.append((n, True))
        for c in n.children():
            stack.append((c, False))
    return order


def is_first_order(f: QFormula) -> bool:
    return not any(isinstance(n, (ExistsSO, In)) for n in _walk(f))


def block_arity(f: QFormula) -> int:
    return max((len(n.block) for n in _walk(f) if isinstance(n, TimeConstraint)), default=0)


# well-formedness -----------------------------------------------------------


def validate(f: QFormula, k: int, fo_only: bool = False, free=("t0",)) -> list:
    """Problems as (path, message) pairs; an empty list means well-formed forward QkMSO."""
    problems = []

    def visit(g, path, scope):
        if isinstance(g, (Eq, Lt, Qa)):
            for v in sorted(free_fo(g) - scope):
                problems.append((path, f"unbound first-order variable {v}"))
        elif isinstance(g, In):
            if fo_only:
                problems.append((path, "second-order variable in a first-order formula"))
            if g.var not in scope:
                problems.append((path, f"unbound first-order variable {g.var}"))
        elif isinstance(g, (ExistsFO, ForallFO)):
            if g.anchor is None:
                if scope:
                    problems.append((path, f"quantifier over {g.var} is not relativized to an anchor"))
            elif g.anchor not in scope:
                problems.append((path, f"anchor {g.anchor} of {g.var} is unbound"))
            visit(g.body, path + (type(g).__name__ + ":" + g.var,), scope | {g.var})
        elif isinstance(g, ExistsSO):
            if fo_only:
                problems.append((path, "second-order quantifier in a first-order formula"))
            visit(g.body, path + ("ExistsSO:" + g.var,), scope)
        elif isinstance(g, TimeConstraint):
            if len(g.block) >= k:
                problems.append((path, f"metric block of length {len(g.block)} needs k > {len(g.block)}"))
            if g.anchor not in scope:
                problems.append((path, f"anchor {g.anchor} of a time constraint is unbound"))
            extra = free_fo(g) - {g.anchor}
            if extra:
                problems.append((path, f"time constraint has free variables {sorted(extra)} besides {g.anchor}"))
            if free_so(g):
                problems.append((path, f"time constraint mentions free set variables {sorted(free_so(g))}"))
            inner = {g.anchor} | {v for _, v, _ in g.block}
            visit(g.body, path + ("TimeConstraint:" + g.anchor,), scope | inner)
        else:
            for i, c in enumerate(g.children()):
                visit(c, path + (f"{type(g).__name__}[{i}]",), scope)

    visit(f, (), frozenset(free))
    return problems


# evaluation -----------------------------------------------------------------


class _NeedBit(Exception):
    def __init__(self, var, pos):
        self.var = var
        self.pos = pos


def eval_mso(f: QFormula, word: TimedWord, assignment=None) -> bool:
    """Exact model checking; set quantifiers branch lazily on the memberships they query."""
    cap = FO_CAP if is_first_order(f) else SO_CAP
    if len(word) > cap:
        raise ResourceError(f"words longer than {cap} positions are out of range for eval_mso")
    env, so = {}, {}
    for k, v in (assignment or {}).items():
        if isinstance(v, int):
            env[k] = v
        else:
            members = set(v)
            so[k] = {p: p in members for p in range(1, len(word) + 1)}
    return _Checker(word).run(f, env, so)


class _Checker:
    def __init__(self, word):
        self.props = word.props
        self.times = word.times
        self.n = len(word)

    def run(self, f, env, so):
        if isinstance(f, QTrue):
            return True
        if isinstance(f, Eq):
            return env[f.left] == env[f.right]
        if isinstance(f, Lt):
            return env[f.left] < env[f.right]
        if isinstance(f, Qa):
            return f.prop in self.props[env[f.var] - 1]
        if isinstance(f, In):
            bits = so[f.setvar]
            p = env[f.var]
            if p in bits:
                return bits[p]
            raise _NeedBit(f.setvar, p)
        if isinstance(f, QNot):
            return not self.run(f.arg, env, so)
        if isinstance(f, QAnd):
            return self.run(f.left, env, so) and self.run(f.right, env, so)
        if isinstance(f, QOr):
            return self.run(f.left, env, so) or self.run(f.right, env, so)
        if isinstance(f, (ExistsFO, ForallFO)):
            lo = env[f.anchor] + 1 if f.anchor is not None else 1
            want = isinstance(f, ExistsFO)
            for p in range(lo, self.n + 1):
                if self.run(f.body, {**env, f.var: p}, so) == want:
                    return want
            return not want
        if isinstance(f, ExistsSO):
            return self._exists_set(f, env, so, {})
        if isinstance(f, TimeConstraint):
            return self._block(f, 0, env, so)
        raise TypeError(f)

    def _exists_set(self, f, env, so, partial):
        try:
            return self.run(f.body, env, {**so, f.var: partial})
        except _NeedBit as need:
            if need.var != f.var:
                raise
            return any(self._exists_set(f, env, so, {**partial, need.pos: v}) for v in (False, True))

    def _block(self, f, i, env, so):
        if i == len(f.block):
            return self.run(f.body, env, so)
        kind, var, interval = f.block[i]
        a0 = env[f.anchor]
        base = self.times[a0 - 1]
        want = kind == "E"
        for p in range(a0, self.n + 1):
            if interval_contains(interval, self.times[p - 1] - base):
                if self._block(f, i + 1, {**env, var: p}, so) == want:
                    return want
        return not want


# translations ---------------------------------------------------------------


class _Names:
    def __init__(self, taken=()):
        self.taken = set(taken)
        self.k = 0

    def fo(self):
        while True:
            self.k += 1
            name = f"t{self.k}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def so(self):
        while True:
            self.k += 1
            name = f"X{self.k}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _segment(regex, x, y, base, lo_incl, hi_incl, atom, names):
    """The positions p with x <(=) p <(=) y spell a word of L(regex).

    ``base`` is a variable strictly below every candidate position; all
    quantifiers are relativized to it.  ``atom(formula, var)`` translates the
    regex atoms.
    """
    g = Glushkov(regex)
    m = len(g.symbols) - 1

    def inrange(p):
        lo = le(x, p) if lo_incl else Lt(x, p)
        hi = le(p, y) if hi_incl else Lt(p, y)
        return q_and(lo, hi)

    u = names.fo()
    nonempty = ExistsFO(u, base, inrange(u))
    if m == 0:
        return q_not(nonempty) if g.nullable else Q_FALSE
    sets = [names.so() for _ in range(m)]
    p, q, w = names.fo(), names.fo(), names.fo()

    def member(i, v):
        return In(sets[i - 1], v)

    exactly_one = q_and(
        q_or(*(member(i, p) for i in range(1, m + 1))),
        *(q_not(q_and(member(i, p), member(j, p))) for i in range(1, m + 1) for j in range(i + 1, m + 1)))
    labels = q_and(*(q_implies(member(i, p), atom(g.symbols[i], p)) for i in range(1, m + 1)))
    is_first = q_not(ExistsFO(w, base, q_and(inrange(w), Lt(w, p))))
    is_last = q_not(ExistsFO(w, base, q_and(inrange(w), Lt(p, w))))
    first = q_implies(is_first, q_or(*(member(i, p) for i in sorted(g.first))))
    last = q_implies(is_last, q_or(*(member(i, p) for i in sorted(g.accepting - {0}))))
    succ = q_and(Lt(p, q), q_not(ExistsFO(w, base, q_and(Lt(p, w), Lt(w, q)))))
    follow = q_and(*(q_implies(member(i, p), q_or(*(member(j, q) for j in sorted(g.follow[i]))))
                     for i in range(1, m + 1)))
    step = ForallFO(q, base, q_implies(q_and(inrange(q), succ), follow))
    run = ForallFO(p, base, q_implies(inrange(p), q_and(exactly_one, labels, first, last, step)))
    for s in reversed(sets):
        run = ExistsSO(s, run)
    empty = q_not(nonempty) if g.nullable else Q_FALSE
    return q_or(empty, q_and(nonempty, run))


def regex_to_mso(regex, x="x", y="y", names=None):
    """ζ(x, y): the positions x+1..y spell a word of L(regex) (propositional atoms)."""
    names = names or _Names({x, y})
    for a in regex.atoms():
        if not _propositional(a):
            raise PreconditionError(f"regex_to_mso needs propositional atoms; found {a}")
    return _segment(regex, x, y, x, False, True, lambda a, v: _prop_formula(a, v), names)


def _propositional(f):
    return all(isinstance(n, (Prop, TrueF, LNot, LAnd, LOr)) for n in walk(f))


def _prop_formula(f, v):
    return _Translator(None, frat_only=False).go(f, v)


class _Translator:
    def __init__(self, names, frat_only):
        self.names = names or _Names({"t0"})
        self.frat_only = frat_only

    def go(self, f: Formula, t: str) -> QFormula:
        if isinstance(f, Prop):
            return Qa(f.name, t)
        if isinstance(f, TrueF):
            return Q_TRUE
        if isinstance(f, LNot):
            return q_not(self.go(f.arg, t))
        if isinstance(f, LAnd):
            return q_and(self.go(f.left, t), self.go(f.right, t))
        if isinstance(f, LOr):
            return q_or(self.go(f.left, t), self.go(f.right, t))
        if isinstance(f, (Var, Mu, Nu)):
            raise PreconditionError("fixpoint formulas have no QkMSO translation here")
        if isinstance(f, URat):
            return self.go(urat_to_frat(f), t)
        if isinstance(f, FRat):
            return self._frat(f, t)
        if isinstance(f, Rat):
            if self.frat_only:
                raise PreconditionError("the Q2MSO translation accepts FRat modalities only")
            return self._rat(f, t)
        raise TypeError(f)

    def _frat(self, f, t):
        n = self.names
        t1 = n.fo()
        seg = _segment(f.regex, t, t1, t, False, False, self.go, n)
        body = q_and(Lt(t, t1), self.go(f.arg, t1), seg)
        return TimeConstraint(t, (("E", t1, f.interval),), body)

    def _rat(self, f, t):
        n = self.names
        first, last, other = n.fo(), n.fo(), n.fo()
        seg = _segment(f.regex, first, last, t, True, True, self.go, n)
        window = q_implies(Lt(t, other), q_and(le(first, other), le(other, last)))
        body = q_and(Lt(t, first), le(first, last), window, seg)
        hit = TimeConstraint(t, (("E", first, f.interval), ("E", last, f.interval),
                                 ("A", other, f.interval)), body)
        if not Glushkov(f.regex).nullable:
            return hit
        probe = n.fo()
        empty = TimeConstraint(t, (("A", probe, f.interval),), q_not(Lt(t, probe)))
        return q_or(empty, hit)


def ratmtl_to_qkmso(phi: Formula, anchor: str = "t0") -> QFormula:
    """ψ(t0) with ρ, a ⊨ ψ iff ρ, a ⊨ φ."""
    return _Translator(_Names({anchor}), frat_only=False).go(phi, anchor)


def fratmtl_to_q2mso(phi: Formula, anchor: str = "t0") -> QFormula:
    """Like ratmtl_to_qkmso, using one metric quantifier per FRat modality."""
    for n in walk(phi):
        if isinstance(n, Rat):
            raise PreconditionError("the Q2MSO translation accepts FRat modalities only")
    return _Translator(_Names({anchor}), frat_only=True).go(phi, anchor)


# text syntax ------------------------------------------------------------------


def parse_qformula(text: str) -> QFormula:
    """Grammar: quantifiers ``E t.``, ``A t.``, ``E t > t0.``, ``A t > t0.``, ``ES T.``,
    metric ``Em t in t0+I.`` / ``Am t in t0+I.``; atoms ``Q_a(t)``, ``T(t)``,
    ``t < u``, ``t = u``, ``true``, ``false``; connectives ``~ & | ->``."""
    sc = Scanner(text)
    f = _QParser(sc).formula()
    sc.finish()
    return f


class _QParser:
    def __init__(self, sc):
        self.sc = sc

    def formula(self):
        word = self.sc.peek_word()
        if word in ("E", "A", "ES", "Em", "Am"):
            return self.quantified()
        left = self.disjunction()
        if self.sc.accept("->"):
            return q_implies(left, self.formula())
        return left

    def quantified(self):
        sc = self.sc
        word = sc.ident()
        if word == "ES":
            var = sc.ident("set variable")
            sc.expect(".")
            return ExistsSO(var, self.formula())
        if word in ("Em", "Am"):
            block = []
            anchor = None
            while True:
                var = sc.ident("variable")
                if not sc.accept_word("in"):
                    raise sc.error("expected 'in'")
                a = sc.ident("anchor variable")
                if anchor is not None and a != anchor:
                    raise sc.error("a metric block shares one anchor")
                anchor = a
                sc.expect("+")
                interval = sc.interval()
                sc.expect(".")
                block.append(("E" if word == "Em" else "A", var, interval))
                nxt = sc.peek_word()
                if nxt in ("Em", "Am") and self._same_anchor(anchor):
                    word = sc.ident()
                    continue
                break
            return TimeConstraint(anchor, tuple(block), self.formula())
        var = sc.ident("variable")
        anchor = None
        if sc.accept(">"):
            anchor = sc.ident("anchor variable")
        sc.expect(".")
        body = self.formula()
        return ExistsFO(var, anchor, body) if word == "E" else ForallFO(var, anchor, body)

    def _same_anchor(self, anchor):
        sc = self.sc
        save = sc.pos
        try:
            sc.ident()
            sc.ident()
            if not sc.accept_word("in"):
                return False
            return sc.ident() == anchor
        except InputError:
            return False
        finally:
            sc.pos = save

    def disjunction(self):
        f = self.conjunction()
        while self.sc.accept("|"):
            f = QOr(f, self.conjunction_or_quant())
        return f

    def conjunction_or_quant(self):
        if self.sc.peek_word() in ("E", "A", "ES", "Em", "Am"):
            return self.quantified()
        return self.conjunction()

    def conjunction(self):
        f = self.unary()
        while self.sc.peek("&"):
            self.sc.accept("&")
            if self.sc.peek_word() in ("E", "A", "ES", "Em", "Am"):
                f = QAnd(f, self.quantified())
            else:
                f = QAnd(f, self.unary())
        return f

    def unary(self):
        sc = self.sc
        if sc.accept("~"):
            if sc.peek_word() in ("E", "A", "ES", "Em", "Am"):
                return QNot(self.quantified())
            return QNot(self.unary())
        if sc.accept("("):
            f = self.formula()
            sc.expect(")")
            return f
        start = sc.pos
        word = sc.ident("formula")
        if word == "true":
            return Q_TRUE
        if word == "false":
            return Q_FALSE
        if word.startswith("Q_"):
            sc.expect("(")
            v = sc.ident("variable")
            sc.expect(")")
            return Qa(word[2:], v)
        if word[0].isupper() and sc.peek("("):
            sc.expect("(")
            v = sc.ident("variable")
            sc.expect(")")
            return In(word, v)
        if sc.accept("<"):
            return Lt(word, sc.ident("variable"))
        if sc.accept(">"):
            return Lt(sc.ident("variable"), word)
        if sc.accept("="):
            return Eq(word, sc.ident("variable"))
        raise sc.error(f"unexpected {word!r}", start)


def format_qformula(f: QFormula, ctx: int = 0) -> str:
    if isinstance(f, QTrue):
        return "true"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Lt):
        return f"{f.left} < {f.right}"
    if isinstance(f, Qa):
        return f"Q_{f.prop}({f.var})"
    if isinstance(f, In):
        return f"{f.setvar}({f.var})"
    if isinstance(f, QNot):
        if f.arg == Q_TRUE:
            return "false"
        return "~" + format_qformula(f.arg, 3)
    if isinstance(f, QAnd):
        text = format_qformula(f.left, 2) + " & " + format_qformula(f.right, 3)
        return f"({text})" if ctx > 2 else text
    if isinstance(f, QOr):
        text = format_qformula(f.left, 1) + " | " + format_qformula(f.right, 2)
        return f"({text})" if ctx > 1 else text
    if isinstance(f, (ExistsFO, ForallFO)):
        q = "E" if isinstance(f, ExistsFO) else "A"
        rel = f" > {f.anchor}" if f.anchor else ""
        text = f"{q} {f.var}{rel}. {format_qformula(f.body)}"
    elif isinstance(f, ExistsSO):
        text = f"ES {f.var}. {format_qformula(f.body)}"
    elif isinstance(f, TimeConstraint):
        head = " ".join(f"{k}m {v} in {f.anchor}+{i}." for k, v, i in f.block)
        body = f.body
        if isinstance(body, TimeConstraint) and body.anchor == f.anchor:
            # keep a nested block on the same anchor visibly separate
            text = f"{head} ({format_qformula(body)})"
        else:
            text = f"{head} {format_qformula(body)}"
    else:
        raise TypeError(f)
    return f"({text})" if ctx > 0 else text


def load_qformula(text: str) -> QFormula:
    return parse_qformula(text)
