"""Automata to formulas: island by island, resets replaced by witness props."""
from __future__ import annotations

from .ata import (ATA, BOT, TOP, Bot, Clock, Loc, Top, _dnf, dualize, fresh_name,
                  reset_locations, substitute_locs)
from .automata import eliminate, letter_formula
from .core import Interval, all_subsets, nonempty_subsets
from .errors import NotConjunctiveDisjunctiveError
from .logic import (EPS, FALSE, TRUE, Atom, FRat, box_false, land, lor, neg, substitute, union)
from .structure import cd_partition, cd_violation, island_order
from .untiming import afa_to_dfa, synthesize_ratmtl, untime


class IslandPlan:
    """The stripped, reset-free view of one island of a normal-form automaton."""

    def __init__(self, automaton, header, witnesses, valid, sigma):
        self.automaton = automaton      # reset-free ATA over sigma plus witness props
        self.header = header
        self.witnesses = witnesses      # reset target -> witness prop name
        self.valid = valid              # the prop sets that can occur
        self.sigma = sigma


def strip_resets(N: ATA, island, header, witnesses: dict) -> IslandPlan:
    """Reset-free copy of one island over Σ extended with one prop per reset target.

    ``witnesses`` maps every reset target of the island to a fresh prop name;
    x.s becomes true exactly on letters carrying the prop of s.
    """
    island = [s for s in N.locations if s in island]
    targets = set()
    for s in island:
        for a in N.letters():
            targets |= reset_locations(N.transition(s, a))
    missing = targets - set(witnesses)
    if missing:
        raise ValueError(f"no witness for reset targets {sorted(missing)}")
    used = {p: witnesses[p] for p in sorted(targets)}
    names = sorted(used.values())
    sigma = N.alphabet
    valid = [S | T for S in nonempty_subsets(sigma) for T in all_subsets(names)]
    delta = {}
    for s in island:
        for S in nonempty_subsets(sigma):
            f = N.transition(s, S)
            for T in all_subsets(names):
                g = substitute_locs(f, reset=lambda p, T=T: TOP if used[p] in T else BOT)
                if not isinstance(g, Bot):
                    delta[(s, S | T)] = g
    P = ATA(sigma | set(names), island, header, N.finals & set(island), delta, check=False)
    return IslandPlan(P, header, used, valid, sigma)


def _witness_names(N: ATA, dec):
    taken = set(N.alphabet)
    out = {}
    for h in dec.headers:
        name = fresh_name("w_" + _slug(h), taken)
        taken.add(name)
        out[h] = name
    return out


def _slug(name):
    return "".join(c if c.isalnum() else "_" for c in name).lower()


def island_formula(plan: IslandPlan, anchored: bool, c_max=None):
    """RatMTL formula of a stripped island, witness props left in place."""
    A = untime(plan.automaton, c_max=c_max, props=plan.valid)
    D = afa_to_dfa(A)
    return synthesize_ratmtl(D, anchored=anchored, valid=plan.valid), D


def decompile(A: ATA, details=False):
    """A RatMTL formula φ with ρ,1 ⊨ φ iff A accepts ρ (A must have loop-free resets)."""
    N, dec, order = island_order(A)
    names = _witness_names(N, dec)
    bodies, dfas = {}, {}
    root = dec.headers.index(N.initial)
    for i in order:
        h = dec.headers[i]
        plan = strip_resets(N, dec.islands[i], h, names)
        f, D = island_formula(plan, anchored=(i == root))
        bodies[h] = substitute(f, {names[p]: bodies[p] for p in plan.witnesses})
        dfas[h] = D
    result = bodies[N.initial]
    if details:
        return result, {"normalized": N, "islands": dec, "order": order, "dfas": dfas,
                        "witnesses": names, "bodies": bodies}
    return result


# conjunctive-disjunctive route ---------------------------------------------


def _nfa_view(P: ATA, valid):
    """Edges, immediate-accept intervals and final moves of a disjunctive reset-free island."""
    edges, accept, to_final = {}, {}, {}
    for s in P.locations:
        for S in valid:
            for clause in _dnf(P.transition(s, S)):
                locs = [a for a in clause if isinstance(a, Loc)]
                clocks = [a for a in clause if isinstance(a, Clock)]
                if locs:
                    q = locs[0].name
                    edges.setdefault((s, q), set()).add(S)
                    if q in P.finals:
                        to_final.setdefault(s, set()).add(S)
                else:
                    interval = clocks[0].interval if clocks else Interval.everything()
                    accept.setdefault((s, interval), set()).add(S)
    return edges, accept, to_final


def disjunctive_formula(P: ATA, valid, anchored: bool):
    """FRat formula of a disjunctive reset-free island, read strictly after the anchor
    (or from the anchor itself when ``anchored``)."""
    valid = [frozenset(v) for v in valid]
    base = frozenset().union(*valid)
    edges, accept, to_final = _nfa_view(P, valid)
    states = list(P.locations)

    def atom(letters):
        return letter_formula(letters, base, valid)

    def label(letters):
        return Atom(atom(letters))

    def path(p, q):
        return eliminate(edges, p, [q], label, nodes=set(states))

    end = box_false()
    memo = {}

    def strict(p):
        if p in memo:
            return memo[p]
        parts = []
        for q in states:
            re = path(p, q)
            if re is None:
                continue
            for (s, interval), letters in sorted(accept.items(), key=lambda kv: (str(kv[0][1]))):
                if s == q:
                    parts.append(FRat(interval, re, atom(letters)))
            if q in to_final:
                parts.append(FRat(Interval.everything(), re, land(atom(to_final[q]), end)))
        if p in P.finals:
            parts.append(end)
        memo[p] = lor(*parts)
        return memo[p]

    if not anchored:
        return strict(P.initial)
    h = P.initial
    groups = {}
    for S in valid:
        now = []
        for clause in _dnf(P.transition(h, S)):
            locs = [a for a in clause if isinstance(a, Loc)]
            clocks = [a for a in clause if isinstance(a, Clock)]
            if locs:
                now.append(strict(locs[0].name))
            elif not clocks or 0 in clocks[0].interval:
                now.append(TRUE)
        groups.setdefault(lor(*now), []).append(S)
    return lor(*(land(atom(letters), f) for f, letters in groups.items()))


def _dual_island(P: ATA, valid) -> ATA:
    delta = {}
    for s in P.locations:
        for S in valid:
            g = dualize(P.transition(s, S))
            if not isinstance(g, Bot):
                delta[(s, S)] = g
    return ATA(P.alphabet, P.locations, P.initial, set(P.locations) - P.finals, delta, check=False)


def decompile_frat(A: ATA, details=False):
    """An FRat-only formula for a conjunctive-disjunctive automaton with loop-free resets."""
    N, dec, order = island_order(A)
    part = cd_partition(N)
    if part is None:
        s, letter, reason = cd_violation(A)
        raise NotConjunctiveDisjunctiveError(s, letter, reason)
    conj_locs = part[0]
    names = _witness_names(N, dec)
    bodies = {}
    root = dec.headers.index(N.initial)
    for i in order:
        h = dec.headers[i]
        plan = strip_resets(N, dec.islands[i], h, names)
        anchored = i == root
        if h in conj_locs:
            f = neg(disjunctive_formula(_dual_island(plan.automaton, plan.valid), plan.valid, anchored))
        else:
            f = disjunctive_formula(plan.automaton, plan.valid, anchored)
        bodies[h] = substitute(f, {names[p]: bodies[p] for p in plan.witnesses})
    result = bodies[N.initial]
    if details:
        return result, {"normalized": N, "islands": dec, "order": order, "witnesses": names,
                        "bodies": bodies, "conjunctive": conj_locs}
    return result
