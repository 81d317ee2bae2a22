"""Finite-automaton plumbing: regex to DFA over letters, state elimination, letter predicates."""
from __future__ import annotations

from functools import lru_cache

from sympy import And as SymAnd, Not as SymNot, Or as SymOr, Symbol
from sympy.logic import SOPform

from .errors import ResourceError
from .logic import (EPS, FALSE, TRUE, Atom, Formula, Prop, Regex, concat, glushkov, land, lor,
                    neg, star, union)


class DFA:
    """A complete deterministic automaton over an explicit finite alphabet."""

    def __init__(self, states, alphabet, initial, finals, trans):
        self.states = list(states)
        self.alphabet = list(alphabet)
        self.initial = initial
        self.finals = frozenset(finals)
        self.trans = dict(trans)

    def step(self, state, letter):
        return self.trans[(state, letter)]

    def run(self, word, state=None):
        state = self.initial if state is None else state
        for letter in word:
            state = self.trans[(state, letter)]
        return state

    def accepts(self, word) -> bool:
        return self.run(word) in self.finals

    def reachable_from(self, state):
        seen, todo = {state}, [state]
        while todo:
            s = todo.pop()
            for a in self.alphabet:
                t = self.trans[(s, a)]
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def live_states(self):
        """States from which some final state is reachable."""
        rev = {s: set() for s in self.states}
        for (s, _), t in self.trans.items():
            rev[t].add(s)
        live, todo = set(self.finals), list(self.finals)
        while todo:
            s = todo.pop()
            for p in rev[s]:
                if p not in live:
                    live.add(p)
                    todo.append(p)
        return live

    def __repr__(self):
        return f"DFA({len(self.states)} states, {len(self.alphabet)} letters)"


def minimize(D: DFA):
    """Moore partition refinement on the reachable part.

    Returns the minimal DFA and, for each of its states, the list of original
    states it merges.
    """
    reach = sorted(D.reachable_from(D.initial), key=D.states.index)
    block = {s: int(s in D.finals) for s in reach}
    count = len(set(block.values()))
    while True:
        sig = {s: (block[s],) + tuple(block[D.trans[(s, a)]] for a in D.alphabet) for s in reach}
        ids = {}
        for s in reach:
            ids.setdefault(sig[s], len(ids))
        block = {s: ids[sig[s]] for s in reach}
        if len(ids) == count:
            break
        count = len(ids)
    # renumber so the initial state is 0 and numbering follows discovery order
    order = {}
    for s in reach:
        order.setdefault(block[s], len(order))
    members = [[] for _ in order]
    for s in reach:
        members[order[block[s]]].append(s)
    trans = {(order[block[s]], a): order[block[D.trans[(s, a)]]] for s in reach for a in D.alphabet}
    finals = {order[block[s]] for s in reach if s in D.finals}
    return DFA(range(len(order)), D.alphabet, order[block[D.initial]], finals, trans), members


def letter_holds(atom: Formula, letter) -> bool:
    """Truth of a propositional formula on a letter (a set of true props)."""
    from .logic import And, Not, Or, TrueF
    if isinstance(atom, Prop):
        return atom.name in letter
    if isinstance(atom, TrueF):
        return True
    if isinstance(atom, Not):
        return not letter_holds(atom.arg, letter)
    if isinstance(atom, And):
        return letter_holds(atom.left, letter) and letter_holds(atom.right, letter)
    if isinstance(atom, Or):
        return letter_holds(atom.left, letter) or letter_holds(atom.right, letter)
    raise ValueError(f"not a propositional atom: {atom}")


def regex_dfa(regex: Regex, letters, holds=letter_holds, cap=20_000) -> DFA:
    """Subset construction on the Glushkov automaton; states are frozensets of positions."""
    g = glushkov(regex)
    letters = list(letters)
    start = frozenset({0})
    states, trans, todo = [start], {}, [start]
    index = {start}
    while todo:
        s = todo.pop()
        for a in letters:
            t = frozenset(g.step(s, lambda atom: holds(atom, a)))
            trans[(s, a)] = t
            if t not in index:
                index.add(t)
                states.append(t)
                todo.append(t)
                if len(states) > cap:
                    raise ResourceError(f"regex DFA exceeds {cap} states")
    finals = {s for s in states if g.accepting & s}
    return DFA(states, letters, start, finals, trans)


# letter predicates -------------------------------------------------------


def letter_formula(letters, alphabet, valid=None) -> Formula:
    """A small propositional formula true exactly on ``letters`` among ``valid``.

    ``valid`` defaults to all non-empty subsets of the alphabet; letters outside
    it are don't-cares.
    """
    alphabet = tuple(sorted(alphabet))
    letters = frozenset(frozenset(a) for a in letters)
    if valid is not None:
        valid = frozenset(frozenset(a) for a in valid)
    return _letter_formula(letters, alphabet, valid)


@lru_cache(maxsize=50_000)
def _letter_formula(letters, alphabet, valid):
    n = len(alphabet)
    universe = []
    for mask in range(1, 1 << n):
        universe.append(frozenset(a for k, a in enumerate(alphabet) if mask >> k & 1))
    if valid is None:
        valid = frozenset(universe)
    letters = letters & valid
    if not letters:
        return FALSE
    if letters == valid:
        return TRUE
    syms = [Symbol(f"v{k}") for k in range(n)]

    def bits(letter):
        return [1 if a in letter else 0 for a in alphabet]

    minterms = [bits(s) for s in sorted(letters, key=sorted)]
    dontcares = [bits(s) for s in universe if s not in valid] + [[0] * n]
    expr = SOPform(syms, minterms, dontcares)
    return _from_sympy(expr, dict(zip(syms, alphabet)))


def _from_sympy(expr, names):
    if expr is True or expr == True:  # noqa: E712 - sympy true
        return TRUE
    if expr is False or expr == False:  # noqa: E712
        return FALSE
    if isinstance(expr, Symbol):
        return Prop(names[expr])
    if isinstance(expr, SymNot):
        return neg(_from_sympy(expr.args[0], names))
    parts = sorted((_from_sympy(a, names) for a in expr.args), key=str)
    if isinstance(expr, SymAnd):
        return land(*parts)
    if isinstance(expr, SymOr):
        return lor(*parts)
    raise TypeError(expr)


# state elimination -------------------------------------------------------


def eliminate(edges, start, finals, label, nodes=None):
    """Regex for the paths from ``start`` to any of ``finals``.

    ``edges`` maps (p, q) to an edge payload; ``label(payload)`` turns the payload
    into a Regex (or None for no edge).  Returns None for the empty language.
    """
    S, F = ("__start__",), ("__final__",)
    nodes = set(nodes) if nodes is not None else {p for p, _ in edges} | {q for _, q in edges}
    nodes |= {start} | set(finals)
    g = {}

    def add(p, q, r):
        if r is None:
            return
        g[(p, q)] = union(g.get((p, q)), r)

    for (p, q), payload in edges.items():
        add(p, q, label(payload))
    add(S, start, EPS)
    for f in finals:
        add(f, F, EPS)

    remaining = set(nodes)
    while remaining:
        def degree(s):
            return sum(1 for (p, q) in g if (p == s) != (q == s))
        s = min(remaining, key=lambda s: (degree(s), repr(s)))
        remaining.discard(s)
        loop = g.pop((s, s), None)
        ins = [(p, r) for (p, q), r in g.items() if q == s]
        outs = [(q, r) for (p, q), r in g.items() if p == s]
        for p, _ in ins:
            g.pop((p, s))
        for q, _ in outs:
            g.pop((s, q))
        mid = star(loop) if loop is not None else EPS
        for p, r1 in ins:
            for q, r2 in outs:
                add(p, q, concat(r1, mid, r2))
    return g.get((S, F))


def atom_regex(formula: Formula) -> Regex:
    return Atom(formula)
