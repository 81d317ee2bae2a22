"""Seeded random generators for timed words, formulas, automata and equation systems."""
from __future__ import annotations

import random
from fractions import Fraction

from .ata import ATA, BOT, Clock, Loc, ResetLoc, conj, disj
from .core import Interval, TimedWord, nonempty_subsets
from .fixpoint import EquationSystem
from .logic import (EPS, TRUE, And, Atom, Concat, FRat, Not, Or, Prop, Rat, Star, URat, Union,
                    Var, walk)

PROPS = "abc"


def props_for(size: int):
    return list(PROPS[:size])


# timed words -----------------------------------------------------------------


def random_word(rng: random.Random, alphabet, length: int, horizon: int = 4, max_den: int = 16):
    """Timestamps k/d with d <= max_den in [0, horizon], sorted, the first forced to 0."""
    letters = nonempty_subsets(alphabet)
    times = []
    for _ in range(length - 1):
        d = rng.randint(1, max_den)
        times.append(Fraction(rng.randint(0, horizon * d), d))
    times = [Fraction(0)] + sorted(times)
    return TimedWord((rng.choice(letters), t) for t in times)


def random_words(rng: random.Random, alphabet, count: int, max_len: int = 6, horizon: int = 4):
    return [random_word(rng, alphabet, rng.randint(1, max_len), horizon) for _ in range(count)]


def random_interval(rng: random.Random, c_max: int = 2) -> Interval:
    while True:
        lo = rng.randint(0, c_max)
        lo_closed = rng.random() < 0.5
        if rng.random() < 0.25:
            return Interval(lo, lo_closed, None, False)
        hi = rng.randint(lo, c_max + 1)
        hi_closed = rng.random() < 0.5
        if hi > lo or (lo_closed and hi_closed):
            return Interval(lo, lo_closed, hi, hi_closed)


# formulas ----------------------------------------------------------------------


class FormulaGenerator:
    """Grammar-directed random formulas with modal-depth and size caps.

    ``weights`` gives the relative frequency of each node type; modalities
    not allowed by the fragment are dropped.  ``variables`` lists fixpoint
    variables that may appear, always under a modality (so the result is guarded).
    """

    DEFAULT_WEIGHTS = {"prop": 4, "true": 1, "not": 2, "and": 2, "or": 2,
                       "rat": 3, "frat": 3, "urat": 1}

    def __init__(self, props, max_md: int = 2, max_size: int = 12, c_max: int = 2,
                 fragment: str = "ratmtl", weights=None, variables=(), regex_atoms: int = 3):
        self.props = list(props)
        self.max_md = max_md
        self.max_size = max_size
        self.c_max = c_max
        self.variables = list(variables)
        self.regex_atoms = regex_atoms
        w = dict(self.DEFAULT_WEIGHTS if weights is None else weights)
        if fragment == "fratmtl":
            w.pop("rat", None)
        elif fragment == "prop":
            for k in ("rat", "frat", "urat"):
                w.pop(k, None)
        self.weights = w

    def formula(self, rng: random.Random):
        budget = [self.max_size]
        return self._formula(rng, self.max_md, budget, guarded=False, root=True)

    def _pick(self, rng, md, budget, root=False):
        kinds = [k for k in self.weights if self.weights[k] > 0]
        if root and md > 0 and rng.random() < 0.8:
            # the root is usually modal, otherwise most samples are propositional
            kinds = [k for k in kinds if k in ("rat", "frat", "urat", "not", "and", "or")]
        if md == 0:
            kinds = [k for k in kinds if k not in ("rat", "frat", "urat")]
        if budget[0] <= 1:
            kinds = [k for k in kinds if k in ("prop", "true")] or ["prop"]
        return rng.choices(kinds, [self.weights[k] for k in kinds])[0]

    def _leaf(self, rng, guarded):
        if guarded and self.variables and rng.random() < 0.4:
            return Var(rng.choice(self.variables))
        return Prop(rng.choice(self.props))

    def _formula(self, rng, md, budget, guarded, root=False):
        budget[0] -= 1
        kind = self._pick(rng, md, budget, root)
        if kind == "prop":
            return self._leaf(rng, guarded)
        if kind == "true":
            return TRUE
        if kind == "not":
            return Not(self._formula(rng, md, budget, guarded, root))
        if kind in ("and", "or"):
            left = self._formula(rng, md, budget, guarded, root)
            right = self._formula(rng, md, budget, guarded)
            return And(left, right) if kind == "and" else Or(left, right)
        interval = random_interval(rng, self.c_max)
        regex = self.regex(rng, md - 1, budget)
        if kind == "rat":
            return Rat(interval, regex)
        if kind == "frat":
            return FRat(interval, regex, self._formula(rng, md - 1, budget, True))
        return URat(interval, regex, self._formula(rng, md - 1, budget, True),
                    self._formula(rng, md - 1, budget, True))

    def regex(self, rng, md, budget, atoms=None):
        atoms = self.regex_atoms if atoms is None else atoms
        n = rng.randint(1, atoms)
        return self._regex(rng, n, md, budget)

    def _regex(self, rng, n, md, budget):
        if n <= 1:
            roll = rng.random()
            if roll < 0.08:
                return EPS
            atom = Atom(self._formula(rng, md, budget, True)) if md >= 0 else Atom(TRUE)
            return Star(atom) if roll > 0.75 else atom
        k = rng.randint(1, n - 1)
        left = self._regex(rng, k, md, budget)
        right = self._regex(rng, n - k, md, budget)
        roll = rng.random()
        if roll < 0.5:
            return Concat(left, right)
        if roll < 0.8:
            return Union(left, right)
        return Star(Concat(left, right))


def random_formula(rng: random.Random, props, max_md=2, max_size=12, fragment="ratmtl", **kw):
    return FormulaGenerator(props, max_md, max_size, fragment=fragment, **kw).formula(rng)


def random_system(rng: random.Random, props, n_vars: int = 2, max_md: int = 2, max_size: int = 10):
    """A guarded equation system: every variable occurrence sits under a modality."""
    names = [f"Z{i + 1}" for i in range(n_vars)]
    gen = FormulaGenerator(props, max_md, max_size, variables=names,
                           weights={"prop": 4, "true": 1, "not": 2, "and": 2, "or": 2,
                                    "rat": 3, "frat": 3})
    eqs = []
    for name in names:
        body = gen.formula(rng)
        if not any(isinstance(n, Var) for n in walk(body)):
            # make sure the system actually recurses
            body = Or(body, FRat(random_interval(rng), Star(Atom(Prop(rng.choice(gen.props)))),
                                 Var(rng.choice(names))))
        eqs.append((name, body, rng.choice(["mu", "nu"])))
    return EquationSystem(eqs)


# automata ----------------------------------------------------------------------


def _clock(rng, c_max):
    return Clock(random_interval(rng, c_max))


def _positive(rng, locs, c_max, resets=(), depth=2):
    roll = rng.random()
    if depth == 0 or roll < 0.45:
        pick = rng.random()
        if pick < 0.5 and locs:
            return Loc(rng.choice(locs))
        if pick < 0.7 and resets:
            return ResetLoc(rng.choice(resets))
        if pick < 0.95:
            return _clock(rng, c_max)
        return BOT
    parts = [_positive(rng, locs, c_max, resets, depth - 1) for _ in range(2)]
    return conj(*parts) if roll < 0.7 else disj(*parts)


def random_reset_free_ata(rng: random.Random, alphabet, n_locs: int = 4, c_max: int = 2) -> ATA:
    locs = [f"q{i}" for i in range(n_locs)]
    delta = {}
    for s in locs:
        for a in nonempty_subsets(alphabet):
            delta[(s, a)] = _positive(rng, locs, c_max)
    finals = [s for s in locs if rng.random() < 0.4]
    return ATA(alphabet, locs, locs[0], finals, delta, check=False)


def random_lfr_ata(rng: random.Random, alphabet, n_islands: int = 3, island_size: int = 2,
                   c_max: int = 2) -> ATA:
    """Islands in a fixed order; resets only jump to headers of later islands."""
    islands = [[f"s{k}_{i}" for i in range(rng.randint(1, island_size))] for k in range(n_islands)]
    delta = {}
    for k, island in enumerate(islands):
        later = [isl[0] for isl in islands[k + 1:]]
        free = island[1:] + ([island[0]] if rng.random() < 0.5 else [])
        for s in island:
            for a in nonempty_subsets(alphabet):
                delta[(s, a)] = _positive(rng, free, c_max, later)
    locs = [s for isl in islands for s in isl]
    finals = [s for s in locs if rng.random() < 0.4]
    return ATA(alphabet, locs, locs[0], finals, delta, check=False).reachable()


def random_ata(rng: random.Random, alphabet, n_locs: int = 3, c_max: int = 2) -> ATA:
    """Unrestricted: free moves and resets anywhere, reset cycles included."""
    locs = [f"q{i}" for i in range(n_locs)]
    delta = {}
    for s in locs:
        for a in nonempty_subsets(alphabet):
            delta[(s, a)] = _positive(rng, locs, c_max, locs)
    finals = [s for s in locs if rng.random() < 0.4]
    return ATA(alphabet, locs, locs[0], finals, delta, check=False)


def random_cd_ata(rng: random.Random, alphabet, n_islands: int = 3, island_size: int = 2,
                  c_max: int = 2) -> ATA:
    """A conjunctive-disjunctive automaton with loop-free resets.

    Each island picks a mode.  A disjunctive transition is an OR of clauses,
    each holding at most one free location and never a free location with a
    clock constraint; conjunctive transitions are the dual shape.
    """
    islands = [[f"s{k}_{i}" for i in range(rng.randint(1, island_size))] for k in range(n_islands)]
    delta = {}
    for k, island in enumerate(islands):
        conjunctive = rng.random() < 0.5
        later = [isl[0] for isl in islands[k + 1:]]
        free = island[1:] + ([island[0]] if rng.random() < 0.5 else [])
        for s in island:
            for a in nonempty_subsets(alphabet):
                clauses = [_cd_clause(rng, free, later, c_max, conjunctive)
                           for _ in range(rng.randint(1, 2))]
                delta[(s, a)] = conj(*clauses) if conjunctive else disj(*clauses)
    locs = [s for isl in islands for s in isl]
    finals = [s for s in locs if rng.random() < 0.4]
    return ATA(alphabet, locs, locs[0], finals, delta, check=False).reachable()


def _cd_clause(rng, free, later, c_max, conjunctive):
    glue = disj if conjunctive else conj
    parts = []
    roll = rng.random()
    if roll < 0.5 and free:
        parts.append(Loc(rng.choice(free)))
    elif roll < 0.85:
        parts.append(_clock(rng, c_max))
    if later and rng.random() < 0.4:
        parts.append(ResetLoc(rng.choice(later)))
    if not parts:
        return BOT if not conjunctive else _clock(rng, c_max)
    return glue(*parts)
