"""One-clock alternating timed automata: transition formulas, runs, boolean operations."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .core import (Interval, TimedWord, c_max_of, interval_complement, interval_contains,
                   nonempty_subsets)
from .errors import InputError, ResourceError
from .node import Node
from .parsing import Scanner

DEFAULT_CAP = 100_000


# --------------------------------------------------------------------------
# transition formulas


class TFormula(Node):
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __str__(self):
        return format_tformula(self)


@dataclass(frozen=True, eq=False)
class Top(TFormula):
    pass


@dataclass(frozen=True, eq=False)
class Bot(TFormula):
    pass


TOP = Top()
BOT = Bot()


@dataclass(frozen=True, eq=False)
class Loc(TFormula):
    name: str


@dataclass(frozen=True, eq=False)
class ResetLoc(TFormula):
    """x.s: enter ``name`` with the clock reset to zero."""
    name: str


@dataclass(frozen=True, eq=False)
class Clock(TFormula):
    interval: Interval


@dataclass(frozen=True, eq=False)
class And(TFormula):
    args: tuple

    def children(self):
        return self.args


@dataclass(frozen=True, eq=False)
class Or(TFormula):
    args: tuple

    def children(self):
        return self.args


def conj(*fs) -> TFormula:
    out = []
    for f in fs:
        if isinstance(f, Bot):
            return BOT
        if isinstance(f, Top):
            continue
        for g in (f.args if isinstance(f, And) else (f,)):
            if g not in out:
                out.append(g)
    if not out:
        return TOP
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*fs) -> TFormula:
    out = []
    for f in fs:
        if isinstance(f, Top):
            return TOP
        if isinstance(f, Bot):
            continue
        for g in (f.args if isinstance(f, Or) else (f,)):
            if g not in out:
                out.append(g)
    if not out:
        return BOT
    return out[0] if len(out) == 1 else Or(tuple(out))


def clock(interval: Interval) -> TFormula:
    return TOP if interval.is_everything() else Clock(interval)


def reset_closure(f: TFormula) -> TFormula:
    """x.f: every location is entered with a fresh clock; constraints are read at 0."""
    if isinstance(f, Loc):
        return ResetLoc(f.name)
    if isinstance(f, Clock):
        return TOP if interval_contains(f.interval, 0) else BOT
    if isinstance(f, And):
        return conj(*(reset_closure(g) for g in f.args))
    if isinstance(f, Or):
        return disj(*(reset_closure(g) for g in f.args))
    return f


def substitute_locs(f: TFormula, free=None, reset=None) -> TFormula:
    """Replace location atoms via callbacks returning formulas (None keeps the atom)."""
    if isinstance(f, Loc) and free is not None:
        g = free(f.name)
        return f if g is None else g
    if isinstance(f, ResetLoc) and reset is not None:
        g = reset(f.name)
        return f if g is None else g
    if isinstance(f, And):
        return conj(*(substitute_locs(g, free, reset) for g in f.args))
    if isinstance(f, Or):
        return disj(*(substitute_locs(g, free, reset) for g in f.args))
    return f


def rename_tformula(f: TFormula, mapping) -> TFormula:
    return substitute_locs(f, lambda s: Loc(mapping[s]), lambda s: ResetLoc(mapping[s]))


def dualize(f: TFormula) -> TFormula:
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Clock):
        return disj(*(Clock(i) for i in sorted(interval_complement(f.interval), key=str)))
    if isinstance(f, And):
        return disj(*(dualize(g) for g in f.args))
    if isinstance(f, Or):
        return conj(*(dualize(g) for g in f.args))
    return f


def atoms(f: TFormula):
    if isinstance(f, (And, Or)):
        for g in f.args:
            yield from atoms(g)
    elif not isinstance(f, (Top, Bot)):
        yield f


def free_locations(f) -> set:
    return {a.name for a in atoms(f) if isinstance(a, Loc)}


def reset_locations(f) -> set:
    return {a.name for a in atoms(f) if isinstance(a, ResetLoc)}


def _merge_clocks(clause):
    """Intersect the clock atoms of a clause; None if the clause is unsatisfiable."""
    clocks = [a.interval for a in clause if isinstance(a, Clock)]
    if len(clocks) <= 1:
        return clause
    acc = clocks[0]
    for i in clocks[1:]:
        acc = acc.intersect(i)
        if acc is None:
            return None
    rest = {a for a in clause if not isinstance(a, Clock)}
    if not acc.is_everything():
        rest.add(Clock(acc))
    return frozenset(rest)


def minimize_sets(sets):
    """Keep only the inclusion-minimal members of a collection of frozensets."""
    kept = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


@lru_cache(maxsize=200_000)
def _dnf(f: TFormula) -> tuple:
    if isinstance(f, Top):
        return (frozenset(),)
    if isinstance(f, Bot):
        return ()
    if isinstance(f, Or):
        clauses = [c for g in f.args for c in _dnf(g)]
        return tuple(minimize_sets(clauses))
    if isinstance(f, And):
        acc = [frozenset()]
        for g in f.args:
            sub = _dnf(g)
            nxt = []
            for a in acc:
                for b in sub:
                    merged = _merge_clocks(a | b)
                    if merged is not None:
                        nxt.append(merged)
            acc = minimize_sets(nxt)
            if not acc:
                return ()
        return tuple(acc)
    return (frozenset([f]),)


def to_dnf(f: TFormula) -> set:
    """Minimal disjunctive normal form as a set of clauses (frozensets of atoms)."""
    return set(_dnf(f))


def to_cnf(f: TFormula) -> set:
    """Minimal conjunctive normal form as a set of disjunctive clauses."""
    return {frozenset(_undual(a) for a in clause) for clause in _dnf(_dual_atoms(f))}


def _dual_atoms(f):
    # swap the connectives but keep atoms, so the DNF of the result is the CNF of f
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, And):
        return disj(*(_dual_atoms(g) for g in f.args))
    if isinstance(f, Or):
        return conj(*(_dual_atoms(g) for g in f.args))
    if isinstance(f, Clock):
        return _Marked(f.interval)
    return f


@dataclass(frozen=True, eq=False)
class _Marked(TFormula):
    # a clock atom shielded from interval merging while computing a CNF
    interval: Interval


def _undual(a):
    return Clock(a.interval) if isinstance(a, _Marked) else a


def _clock_ok(clause, value) -> bool:
    return all(interval_contains(a.interval, value) for a in clause if isinstance(a, Clock))


def minimal_models(f: TFormula, value) -> set:
    """Minimal configurations satisfying f when the clock reads ``value``."""
    value = Fraction(value)
    models = []
    for clause in _dnf(f):
        if _clock_ok(clause, value):
            models.append(frozenset(
                (a.name, value) if isinstance(a, Loc) else (a.name, Fraction(0))
                for a in clause if isinstance(a, (Loc, ResetLoc))))
    return set(minimize_sets(models))


# --------------------------------------------------------------------------
# formula text syntax


def parse_tformula(text: str) -> TFormula:
    sc = Scanner(text)
    f = _parse_or(sc)
    sc.finish()
    return f


def _parse_or(sc):
    parts = [_parse_and(sc)]
    while sc.accept("|"):
        parts.append(_parse_and(sc))
    return disj(*parts)


def _parse_and(sc):
    parts = [_parse_atom(sc)]
    while sc.accept("&"):
        parts.append(_parse_atom(sc))
    return conj(*parts)


_COMPARISONS = {
    "<=": lambda c: Interval(0, True, c, True),
    ">=": lambda c: Interval(c, True, None, False),
    "<": lambda c: Interval(0, True, c, False),
    ">": lambda c: Interval(c, False, None, False),
    "=": lambda c: Interval.point(c),
}


def _parse_atom(sc):
    if sc.accept("("):
        f = _parse_or(sc)
        sc.expect(")")
        return f
    start = sc.pos
    word = sc.ident("location, top, bot or clock atom")
    if word in ("top", "true"):
        return TOP
    if word in ("bot", "false"):
        return BOT
    if word == "x":
        if sc.accept("."):
            if sc.accept("("):
                f = _parse_or(sc)
                sc.expect(")")
                return reset_closure(f)
            return ResetLoc(sc.ident("location"))
        if sc.accept_word("in"):
            return clock(sc.interval())
        for op in ("<=", ">=", "<", ">", "="):
            if sc.accept(op):
                return clock(_COMPARISONS[op](sc.integer()))
        raise sc.error("'x' must be followed by '.', 'in' or a comparison", start)
    return Loc(word)


def format_tformula(f: TFormula) -> str:
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Loc):
        return f.name
    if isinstance(f, ResetLoc):
        return f"x.{f.name}"
    if isinstance(f, Clock):
        return f"x in {f.interval}"
    if isinstance(f, And):
        return " & ".join(f"({format_tformula(g)})" if isinstance(g, Or) else format_tformula(g)
                          for g in f.args)
    if isinstance(f, Or):
        return " | ".join(format_tformula(g) for g in f.args)
    raise TypeError(f)


# --------------------------------------------------------------------------
# automata


class ATA:
    """A one-clock alternating timed automaton over letters = non-empty subsets of Σ.

    ``delta`` maps (location, frozenset letter) to a transition formula; a
    missing entry means ``bot``.
    """

    def __init__(self, alphabet, locations, initial, finals, delta, check=True):
        self.alphabet = frozenset(alphabet)
        self.locations = tuple(dict.fromkeys(locations))
        self.initial = initial
        self.finals = frozenset(finals)
        self.delta = {k: v for k, v in dict(delta).items() if not isinstance(v, Bot)}
        if check:
            self._validate()

    def _validate(self):
        locs = set(self.locations)
        if self.initial not in locs:
            raise InputError(f"initial location {self.initial!r} is not declared")
        if not self.finals <= locs:
            raise InputError(f"undeclared final locations {sorted(self.finals - locs)}")
        if "x" in locs:
            raise InputError("'x' is reserved for the clock")
        for (s, letter), f in self.delta.items():
            if s not in locs:
                raise InputError(f"transition from undeclared location {s!r}")
            if not letter or not letter <= self.alphabet:
                raise InputError(f"letter {sorted(letter)} is not a non-empty subset of the alphabet")
            bad = (free_locations(f) | reset_locations(f)) - locs
            if bad:
                raise InputError(f"transition of {s!r} mentions undeclared {sorted(bad)}")

    def transition(self, loc, letter) -> TFormula:
        return self.delta.get((loc, letter), BOT)

    def letters(self):
        return nonempty_subsets(self.alphabet)

    def intervals(self):
        for f in self.delta.values():
            for a in atoms(f):
                if isinstance(a, Clock):
                    yield a.interval

    def c_max(self) -> int:
        return c_max_of(self.intervals())

    def successors(self, loc):
        """(free successors, reset successors) of a location over all letters."""
        free, reset = set(), set()
        for (s, _), f in self.delta.items():
            if s == loc:
                free |= free_locations(f)
                reset |= reset_locations(f)
        return free, reset

    def has_resets(self) -> bool:
        return any(reset_locations(f) for f in self.delta.values())

    def reachable(self) -> "ATA":
        seen, todo = {self.initial}, [self.initial]
        while todo:
            s = todo.pop()
            free, reset = self.successors(s)
            for p in free | reset:
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        locs = [s for s in self.locations if s in seen]
        return ATA(self.alphabet, locs, self.initial, self.finals & seen,
                   {k: v for k, v in self.delta.items() if k[0] in seen}, check=False)

    def renamed(self, mapping) -> "ATA":
        return ATA(self.alphabet, [mapping[s] for s in self.locations], mapping[self.initial],
                   {mapping[s] for s in self.finals},
                   {(mapping[s], a): rename_tformula(f, mapping) for (s, a), f in self.delta.items()},
                   check=False)

    def prefixed(self, prefix: str) -> "ATA":
        return self.renamed({s: prefix + s for s in self.locations})

    def with_alphabet(self, alphabet) -> "ATA":
        """Extend the alphabet; letters mentioning new props copy the transition of their
        restriction, so the new props are ignored."""
        alphabet = frozenset(alphabet)
        if alphabet == self.alphabet:
            return self
        if not self.alphabet <= alphabet:
            raise InputError("alphabet can only be extended")
        delta = {}
        for letter in nonempty_subsets(alphabet):
            base = letter & self.alphabet
            if not base:
                continue
            for s in self.locations:
                f = self.delta.get((s, base))
                if f is not None:
                    delta[(s, letter)] = f
        return ATA(alphabet, self.locations, self.initial, self.finals, delta, check=False)

    def size(self) -> int:
        return len(self.locations)

    def __repr__(self):
        return f"ATA({len(self.locations)} locations, alphabet={sorted(self.alphabet)})"

    # JSON ---------------------------------------------------------------

    def to_json(self):
        delta = []
        for s in self.locations:
            for letter in self.letters():
                f = self.delta.get((s, letter))
                if f is not None:
                    delta.append({"from": s, "letter": sorted(letter), "formula": format_tformula(f)})
        return {"alphabet": sorted(self.alphabet), "locations": list(self.locations),
                "initial": self.initial, "finals": sorted(self.finals), "delta": delta}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data) -> "ATA":
        try:
            alphabet = frozenset(data["alphabet"])
            locations = list(data["locations"])
            initial = data["initial"]
            finals = data.get("finals", [])
            entries = data.get("delta", [])
        except (KeyError, TypeError) as exc:
            raise InputError(f"automaton JSON lacks field {exc}") from None
        delta, defaults = {}, {}
        for entry in entries:
            try:
                src, letter, text = entry["from"], entry["letter"], entry["formula"]
            except (KeyError, TypeError) as exc:
                raise InputError(f"bad delta entry {entry!r}") from None
            f = parse_tformula(text)
            if letter == "_":
                defaults[src] = disj(defaults.get(src, BOT), f)
                continue
            key = (src, frozenset(letter))
            delta[key] = disj(delta.get(key, BOT), f)
        letters = nonempty_subsets(alphabet)
        for src, f in defaults.items():
            for letter in letters:
                delta.setdefault((src, letter), f)
        return cls(alphabet, locations, initial, finals, delta)


def load_ata(path) -> ATA:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON in {path}: {exc.msg}", exc.lineno, exc.colno) from None
    return ATA.from_json(data)


def make_ata(alphabet, locations, initial, finals, table) -> ATA:
    """Build an automaton from a compact table.

    ``table`` maps location -> {letter spec: formula text}; a letter spec is a
    string of single-character props ("ab"), a tuple of props, or "_" for every
    letter not listed.
    """
    alphabet = frozenset(alphabet)
    letters = nonempty_subsets(alphabet)
    delta = {}
    for s, row in table.items():
        default = None
        for spec, text in row.items():
            f = parse_tformula(text) if isinstance(text, str) else text
            if spec == "_":
                default = f
                continue
            letter = frozenset(spec) if isinstance(spec, (str, tuple, list, set, frozenset)) else spec
            delta[(s, letter)] = f
        if default is not None:
            for letter in letters:
                delta.setdefault((s, letter), default)
    return ATA(alphabet, locations, initial, finals, delta)


# --------------------------------------------------------------------------
# runs


def _product_models(config, letter, A, cmax, cap):
    partial = [frozenset()]
    for s, v in config:
        models = _models_cached(A.transition(s, letter), v, cmax)
        if not models:
            return []
        partial = minimize_sets(p | m for p in partial for m in models)
        if len(partial) > cap:
            raise ResourceError(f"more than {cap} configurations")
    return partial


@lru_cache(maxsize=200_000)
def _models_cached(f, value, cmax):
    models = []
    for clause in _dnf(f):
        if _clock_ok(clause, value):
            models.append(frozenset(
                (a.name, value) if isinstance(a, Loc) else (a.name, 0)
                for a in clause if isinstance(a, (Loc, ResetLoc))))
    return tuple(minimize_sets(models))


def run_configurations(A: ATA, word: TimedWord, cap: int = DEFAULT_CAP):
    """Yield the antichain of reachable configurations after each letter.

    Clock values above the automaton's largest constant are clamped to
    c_max + 1, which no guard can tell apart from the true value.
    """
    cmax = A.c_max()
    ceiling = Fraction(cmax + 1)
    configs = [frozenset({(A.initial, Fraction(0))})]
    prev = Fraction(0)
    for letter, t in word:
        if not letter <= A.alphabet:
            raise InputError(f"letter {sorted(letter)} is outside the alphabet {sorted(A.alphabet)}")
        d = t - prev
        prev = t
        nxt = []
        for config in configs:
            moved = frozenset((s, min(v + d, ceiling)) for s, v in config)
            nxt.extend(_product_models(moved, letter, A, cmax, cap))
            if len(nxt) > cap:
                raise ResourceError(f"more than {cap} configurations")
        configs = minimize_sets(nxt)
        yield configs


def accepts(A: ATA, word: TimedWord, cap: int = DEFAULT_CAP) -> bool:
    configs = [frozenset({(A.initial, 0)})]
    for configs in run_configurations(A, word, cap):
        if not configs:
            return False
        if configs[0] == frozenset():
            return True
    return any(all(s in A.finals for s, _ in c) for c in configs)


# --------------------------------------------------------------------------
# boolean operations


def complement(A: ATA) -> ATA:
    delta = {}
    for s in A.locations:
        for letter in A.letters():
            g = dualize(A.transition(s, letter))
            if not isinstance(g, Bot):
                delta[(s, letter)] = g
    finals = set(A.locations) - A.finals
    return ATA(A.alphabet, A.locations, A.initial, finals, delta, check=False)


def fresh_name(base: str, taken) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def _combine(A1: ATA, A2: ATA, op) -> ATA:
    if A1.alphabet != A2.alphabet:
        raise InputError("boolean combination needs equal alphabets")
    if set(A1.locations) & set(A2.locations):
        A1, A2 = A1.prefixed("L:"), A2.prefixed("R:")
    taken = set(A1.locations) | set(A2.locations)
    init = fresh_name("init", taken)
    delta = dict(A1.delta)
    delta.update(A2.delta)
    for letter in A1.letters():
        f = op(reset_closure(A1.transition(A1.initial, letter)),
               reset_closure(A2.transition(A2.initial, letter)))
        if not isinstance(f, Bot):
            delta[(init, letter)] = f
    return ATA(A1.alphabet, (init,) + A1.locations + A2.locations, init,
               A1.finals | A2.finals, delta, check=False).reachable()


def conjoin(A1: ATA, A2: ATA) -> ATA:
    return _combine(A1, A2, conj)


def disjoin(A1: ATA, A2: ATA) -> ATA:
    return _combine(A1, A2, disj)
