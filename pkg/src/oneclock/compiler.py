"""Formulas to automata: modal-depth-one base constructions plus witness discharge."""
from __future__ import annotations

from itertools import product

from .ata import (ATA, BOT, TOP, Bot, Loc, ResetLoc, clock, complement, conj, conjoin, disj,
                  disjoin, fresh_name, reset_closure)
from .automata import letter_holds, regex_dfa
from .core import Interval, all_subsets, nonempty_subsets
from .errors import PreconditionError
from .logic import (FRat, Formula, MODALITIES, Mu, Nu, Not, And, Or, Prop, Rat, TrueF, URat,
                    Var, is_propositional, map_regex, props_of, urat_to_frat, walk)


def _dfa(regex, letters):
    """DFA of a regex over propositional atoms, restricted to its live states."""
    D = regex_dfa(regex, letters, letter_holds)
    live = D.live_states()
    names = {}
    for s in D.states:
        if s in live:
            names[s] = f"d{len(names)}"
    return D, names


def _check_propositional(regex, what):
    for a in regex.atoms():
        if not is_propositional(a):
            raise PreconditionError(f"{what} needs propositional regex atoms; found {a}")


def compile_rat_base(interval: Interval, regex, alphabet) -> ATA:
    """Automaton for Rat_I(re) with propositional atoms, read from the anchor position."""
    _check_propositional(regex, "compile_rat_base")
    letters = nonempty_subsets(alphabet)
    D, names = _dfa(regex, letters)
    below, above = interval.below(), interval.above()
    inside = clock(interval)
    over = clock(above) if above is not None else BOT
    delta = {}

    def move(q, letter):
        t = D.trans[(q, letter)]
        return Loc(names[t]) if t in names else BOT

    for q, name in names.items():
        for a in letters:
            delta[(name, a)] = disj(conj(inside, move(q, a)), over if q in D.finals else BOT)
    finals = {names[q] for q in D.finals if q in names}
    locations = ["init"]
    if below is None:
        # the interval starts at 0: the DFA runs from the first later position
        start = Loc(names[D.initial]) if D.initial in names else BOT
        for a in letters:
            delta[("init", a)] = reset_closure(start) if start is not BOT else BOT
    else:
        locations.append("tc")
        for a in letters:
            delta[("init", a)] = ResetLoc("tc")
            delta[("tc", a)] = disj(conj(clock(below), Loc("tc")),
                                    conj(inside, move(D.initial, a)),
                                    over if D.initial in D.finals else BOT)
        if D.initial in D.finals:
            finals.add("tc")
    locations += list(names.values())
    return ATA(alphabet, locations, "init", finals, delta, check=False).reachable()


def compile_frat_base(interval: Interval, regex, arg: Formula, alphabet) -> ATA:
    """Automaton for FRat_{I,re}(ψ) with propositional atoms and argument."""
    _check_propositional(regex, "compile_frat_base")
    if not is_propositional(arg):
        raise PreconditionError(f"compile_frat_base needs a propositional argument; found {arg}")
    letters = nonempty_subsets(alphabet)
    D, names = _dfa(regex, letters)
    inside = clock(interval)
    delta = {}
    for q, name in names.items():
        for a in letters:
            t = D.trans[(q, a)]
            step = Loc(names[t]) if t in names else BOT
            hit = inside if q in D.finals and letter_holds(arg, a) else BOT
            delta[(name, a)] = disj(step, hit)
    start = ResetLoc(names[D.initial]) if D.initial in names else BOT
    for a in letters:
        delta[("init", a)] = start
    return ATA(alphabet, ["init"] + list(names.values()), "init", (), delta, check=False).reachable()


def _propositional_ata(f: Formula, alphabet) -> ATA:
    delta = {("init", a): TOP for a in nonempty_subsets(alphabet) if letter_holds(f, a)}
    return ATA(alphabet, ["init"], "init", (), delta, check=False)


# witness discharge ------------------------------------------------------


def anchor(A: ATA, letter):
    """A's first step on ``letter`` at clock 0, with every target entered on a reset."""
    return reset_closure(A.transition(A.initial, letter))


def discharge(C: ATA, witnesses: dict, alphabet, conjunctive=frozenset()) -> ATA:
    """Replace witness props by reset jumps into their automata.

    ``witnesses`` maps each prop z to (A_z, A_notz), both over ``alphabet``.
    Locations listed in ``conjunctive`` use the dual (CNF) encoding, which
    keeps conjunctive islands conjunctive.
    """
    alphabet = frozenset(alphabet)
    zs = sorted(witnesses)
    parts, taken = [], set(C.locations)
    pos, negs = {}, {}
    for k, z in enumerate(zs):
        A, notA = witnesses[z]
        A = _fresh_prefix(A, f"w{k + 1}:", taken)
        notA = _fresh_prefix(notA, f"v{k + 1}:", taken)
        pos[z], negs[z] = A, notA
        parts += [A, notA]
    delta = {}
    for s in C.locations:
        for S in nonempty_subsets(alphabet):
            table = {T: C.transition(s, S | T) for T in all_subsets(zs)}
            relevant = [z for z in zs if any(table[T] != table[T ^ {z}] for T in table)]
            pieces = []
            for bits in product((False, True), repeat=len(relevant)):
                T = frozenset(z for z, b in zip(relevant, bits) if b)
                g = table[T]
                if s in conjunctive:
                    guard = disj(*(anchor(negs[z], S) if z in T else anchor(pos[z], S) for z in relevant))
                    pieces.append(disj(g, guard))
                else:
                    guard = conj(*(anchor(pos[z], S) if z in T else anchor(negs[z], S) for z in relevant))
                    pieces.append(conj(g, guard))
            f = conj(*pieces) if s in conjunctive else disj(*pieces)
            if not isinstance(f, Bot):
                delta[(s, S)] = f
    locations = list(C.locations)
    finals = set(C.finals)
    for A in parts:
        delta.update(A.delta)
        locations += A.locations
        finals |= A.finals
    return ATA(alphabet, locations, C.initial, finals, delta, check=False).reachable()


def _fresh_prefix(A: ATA, prefix, taken):
    while any(prefix + s in taken for s in A.locations):
        prefix = prefix + "'"
    A = A.prefixed(prefix)
    taken.update(A.locations)
    return A


# formulas ---------------------------------------------------------------


class _Compiler:
    def __init__(self, alphabet, frat_only):
        self.alphabet = frozenset(alphabet)
        self.frat_only = frat_only
        self.memo = {}

    def run(self, f: Formula) -> ATA:
        if f in self.memo:
            return self.memo[f]
        out = self._compile(f)
        self.memo[f] = out
        return out

    def _compile(self, f):
        if isinstance(f, (Var, Mu, Nu)):
            raise PreconditionError("fixpoint formulas are compiled through equation systems")
        if is_propositional(f):
            return _propositional_ata(f, self.alphabet)
        if isinstance(f, Not):
            return complement(self.run(f.arg))
        if isinstance(f, And):
            return conjoin(self.run(f.left), self.run(f.right))
        if isinstance(f, Or):
            return disjoin(self.run(f.left), self.run(f.right))
        if isinstance(f, URat):
            return self.run(urat_to_frat(f))
        if isinstance(f, Rat) and self.frat_only:
            raise PreconditionError("compile_frat accepts FRat modalities only")
        return self._modal(f)

    def _modal(self, f):
        # maximal modal subformulas under this modality become witness props
        taken = set(self.alphabet)
        table = {}

        def lift(g):
            if is_propositional(g):
                return g
            if isinstance(g, MODALITIES):
                if g not in table:
                    table[g] = Prop(fresh_name("z", taken))
                    taken.add(table[g].name)
                return table[g]
            if isinstance(g, Not):
                return Not(lift(g.arg))
            if isinstance(g, And):
                return And(lift(g.left), lift(g.right))
            if isinstance(g, Or):
                return Or(lift(g.left), lift(g.right))
            raise PreconditionError(f"unexpected subformula {g}")

        regex = map_regex(f.regex, lift)
        arg = lift(f.arg) if isinstance(f, FRat) else None
        ext = self.alphabet | {p.name for p in table.values()}
        if isinstance(f, Rat):
            C = compile_rat_base(f.interval, regex, ext)
        else:
            C = compile_frat_base(f.interval, regex, arg, ext)
        if not table:
            return C
        witnesses = {}
        for g, z in table.items():
            A = self.run(g)
            witnesses[z.name] = (A, complement(A))
        return discharge(C, witnesses, self.alphabet)


def compile_formula(phi: Formula, alphabet=None) -> ATA:
    """A one-clock automaton with loop-free resets accepting ρ iff ρ,1 ⊨ φ."""
    alphabet = props_of(phi) if alphabet is None else frozenset(alphabet)
    if not alphabet:
        alphabet = frozenset({"p"})
    return _Compiler(alphabet, frat_only=False).run(phi)


def compile_frat(phi: Formula, alphabet=None) -> ATA:
    """Like compile_formula for FRat-only formulas; the result is conjunctive-disjunctive."""
    for n in walk(phi):
        if isinstance(n, Rat):
            raise PreconditionError("compile_frat accepts FRat modalities only; found a Rat node")
    alphabet = props_of(phi) if alphabet is None else frozenset(alphabet)
    if not alphabet:
        alphabet = frozenset({"p"})
    return _Compiler(alphabet, frat_only=True).run(phi)


compile = compile_formula
