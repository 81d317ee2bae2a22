"""Untiming of reset-free automata: AFA over region letters, determinization, synthesis."""
from __future__ import annotations

from functools import lru_cache

from .ata import (ATA, BOT, TOP, And, Bot, Clock, Loc, ResetLoc, Top, _dnf, atoms, conj, disj,
                  format_tformula, reset_locations)
from .automata import DFA, eliminate, letter_formula, minimize
from .core import Region, all_regions
from .errors import PreconditionError, ResourceError
from .logic import EPS, FALSE, TRUE, Atom, Concat, Rat, Star, land, lor, union

DFA_CAP = 5_000
SYNTH_CAP = 200_000


class AFA:
    """An untimed alternating automaton whose letters are (prop set, region) pairs.

    ``props`` lists the prop sets that can occur; ``delta`` maps (state, letter)
    to a positive formula over ``Loc`` atoms, a missing entry meaning ``bot``.
    """

    def __init__(self, props, c_max, states, initial, finals, delta):
        self.props = [frozenset(p) for p in props]
        self.c_max = c_max
        self.regions = all_regions(c_max)
        self.states = list(states)
        self.initial = initial
        self.finals = frozenset(finals)
        self.delta = {k: v for k, v in delta.items() if not isinstance(v, Bot)}

    @property
    def alphabet(self):
        return [(p, r) for r in self.regions for p in self.props]

    def transition(self, state, letter):
        return self.delta.get((state, letter), BOT)

    def to_json(self):
        return {
            "states": self.states,
            "initial": self.initial,
            "finals": sorted(self.finals, key=self.states.index),
            "c_max": self.c_max,
            "delta": [{"from": s, "props": sorted(p), "region": str(r), "formula": format_tformula(f)}
                      for (s, (p, r)), f in self.delta.items()],
        }

    def __repr__(self):
        return f"AFA({len(self.states)} states, {len(self.props)} prop sets, c_max={self.c_max})"


def _resolve(f, region: Region):
    if isinstance(f, Clock):
        return TOP if region.within(f.interval) else BOT
    if isinstance(f, ResetLoc):
        raise PreconditionError(f"untiming needs a reset-free automaton; found x.{f.name}")
    if isinstance(f, (Top, Bot, Loc)):
        return f
    parts = [_resolve(g, region) for g in f.args]
    return conj(*parts) if isinstance(f, And) else disj(*parts)


def untime(P: ATA, c_max=None, props=None) -> AFA:
    """The region AFA of a reset-free automaton whose clock starts at 0 with the run."""
    if P.has_resets():
        bad = sorted(s for (s, _), f in P.delta.items() if reset_locations(f))
        raise PreconditionError(f"untiming needs a reset-free automaton; {bad[0]} resets the clock")
    c_max = P.c_max() if c_max is None else max(c_max, P.c_max())
    props = list(P.letters()) if props is None else [frozenset(p) for p in props]
    delta = {}
    for s in P.locations:
        for p in props:
            f = P.transition(s, p)
            for r in all_regions(c_max):
                g = _resolve(f, r)
                if not isinstance(g, Bot):
                    delta[(s, (p, r))] = g
    return AFA(props, c_max, P.locations, P.initial, P.finals, delta)


def _holds(f, states) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Loc):
        return f.name in states
    vals = (_holds(g, states) for g in f.args)
    return all(vals) if isinstance(f, And) else any(vals)


def afa_accepts(A: AFA, word) -> bool:
    """Backward evaluation: the set of states accepting each suffix."""
    good = set(A.finals)
    for letter in reversed(list(word)):
        good = {s for s in A.states if _holds(A.transition(s, letter), good)}
    return A.initial in good


def afa_to_dfa(A: AFA, cap: int = DFA_CAP) -> DFA:
    """Determinize by tracking the pending obligation in DNF (a set of state sets).

    The result is minimized. States are integers; ``dfa.meaning[i]`` lists the
    antichains of state sets merged into state i.
    """
    alphabet = A.alphabet

    @lru_cache(maxsize=None)
    def step_clause(clause, letter):
        f = conj(*(A.transition(s, letter) for s in clause))
        return tuple(frozenset(a.name for a in c) for c in _dnf(f))

    def step(dstate, letter):
        out = set()
        for clause in dstate:
            out.update(step_clause(clause, letter))
        return _antichain(out)

    start = _antichain({frozenset([A.initial])})
    index = {start: 0}
    order, trans, todo = [start], {}, [start]
    while todo:
        d = todo.pop()
        for letter in alphabet:
            e = step(d, letter)
            if e not in index:
                if len(order) >= cap:
                    raise ResourceError(f"determinization exceeds {cap} states")
                index[e] = len(order)
                order.append(e)
                todo.append(e)
            trans[(index[d], letter)] = index[e]
    finals = {i for i, d in enumerate(order) if any(c <= A.finals for c in d)}
    dfa, members = minimize(DFA(range(len(order)), alphabet, 0, finals, trans))
    dfa.meaning = [[order[i] for i in m] for m in members]
    dfa.props = A.props
    dfa.c_max = A.c_max
    return dfa


def _antichain(clauses):
    kept = []
    for c in sorted(set(clauses), key=lambda c: (len(c), sorted(c))):
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def dfa_accepts(D: DFA, word) -> bool:
    return D.accepts(list(word))


# regexes per region -----------------------------------------------------


def region_regex(D: DFA, p, q, region: Region, valid=None):
    """Regex (over prop-set predicates) for the non-empty words in (props x {region})+
    leading D from p to q; None for the empty language."""
    props = list(D.props) if valid is None else list(valid)
    base = frozenset().union(*props) if props else frozenset()
    edges = {}
    src = ("src",)
    for s in D.states:
        for a in props:
            t = D.trans[(s, (a, region))]
            edges.setdefault((s, t), set()).add(a)
            if s == p:
                edges.setdefault((src, t), set()).add(a)

    def label(letters):
        return Atom(letter_formula(letters, base, props))

    return eliminate(edges, src, [q], label, nodes=set(D.states))


def block_regex(D: DFA, p, q, region: Region, valid=None):
    """Words in (props x {region})* leading p to q, the empty word included when p = q."""
    r = region_regex(D, p, q, region, valid)
    if p != q:
        return r
    if isinstance(r, Concat) and isinstance(r.right, Star) and r.right.arg == r.left:
        return r.right
    return union(EPS, r)


# synthesis --------------------------------------------------------------


def _trim(D: DFA):
    """(live states, universal states): states with some / only accepting futures."""
    live = D.live_states()
    dead = set(D.states) - set(D.finals)
    rev = {s: set() for s in D.states}
    for (s, _), t in D.trans.items():
        rev[t].add(s)
    bad, todo = set(dead), list(dead)
    while todo:
        s = todo.pop()
        for p in rev[s]:
            if p not in bad:
                bad.add(p)
                todo.append(p)
    return live, set(D.states) - bad


def synthesize_ratmtl(D: DFA, anchored: bool = True, valid=None, cap: int = SYNTH_CAP):
    """A RatMTL formula for the region language of D.

    Anchored: ρ,1 ⊨ φ iff reg(ρ) ∈ L(D); the first letter is split off as a
    propositional case.  Strict (anchored=False): ρ,k ⊨ φ iff the relative
    region word of positions k+1..n is in L(D).
    """
    props = list(D.props) if valid is None else [frozenset(p) for p in valid]
    regions = all_regions(D.c_max)
    live, universal = _trim(D)
    memo = {}
    budget = [0]

    def F(q, idx):
        if q not in live:
            return FALSE
        if q in universal:
            return TRUE
        if idx == len(regions):
            return TRUE if q in D.finals else FALSE
        key = (q, idx)
        if key in memo:
            return memo[key]
        r = regions[idx]
        interval = r.as_interval()
        grouped = {}
        for q2 in _block_targets(D, q, r, props):
            budget[0] += 1
            if budget[0] > cap:
                raise ResourceError(f"synthesis exceeds {cap} blocks")
            rest = F(q2, idx + 1)
            if rest == FALSE:
                continue
            re = block_regex(D, q, q2, r, props)
            if re is None:
                continue
            # blocks sharing a continuation merge into one regex union
            grouped[rest] = union(grouped.get(rest), re)
        parts = [land(Rat(interval, re), rest) for rest, re in grouped.items()]
        out = lor(*parts)
        memo[key] = out
        return out

    if not anchored:
        return F(D.initial, 0)
    base = frozenset().union(*props) if props else frozenset()
    first = regions[0]
    groups = {}
    for a in props:
        groups.setdefault(D.trans[(D.initial, (a, first))], []).append(a)
    parts = []
    for q, letters in sorted(groups.items()):
        rest = F(q, 0)
        if rest == FALSE:
            continue
        parts.append(land(letter_formula(letters, base, props), rest))
    return lor(*parts)


def _block_targets(D: DFA, q, region, props):
    """DFA states reachable from q by words over (props x {region})*."""
    seen, todo = {q}, [q]
    while todo:
        s = todo.pop()
        for a in props:
            t = D.trans[(s, (a, region))]
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return sorted(seen)


# aperiodicity -----------------------------------------------------------


def is_aperiodic(D: DFA, cap: int = 50_000) -> bool:
    """Whether the transition monoid of D has only trivial subgroups."""
    states = list(D.states)
    pos = {s: i for i, s in enumerate(states)}
    gens = {tuple(pos[D.trans[(s, a)]] for s in states) for a in D.alphabet}
    ident = tuple(range(len(states)))
    monoid, todo = {ident}, [ident]
    while todo:
        m = todo.pop()
        for g in gens:
            n = tuple(g[i] for i in m)
            if n not in monoid:
                monoid.add(n)
                todo.append(n)
                if len(monoid) > cap:
                    raise ResourceError(f"transition monoid exceeds {cap} elements")
    k = len(states)
    for m in monoid:
        power = m
        for _ in range(k - 1):
            power = tuple(m[i] for i in power)
        if tuple(m[i] for i in power) != power:
            return False
    return True


# rendering --------------------------------------------------------------


def _letter_text(letter):
    props, region = letter
    return "{" + ",".join(sorted(props)) + "}," + str(region)


def dfa_to_json(D: DFA):
    return {
        "states": list(D.states),
        "initial": D.initial,
        "finals": sorted(D.finals),
        "c_max": getattr(D, "c_max", None),
        "trans": [{"from": s, "props": sorted(a[0]), "region": str(a[1]), "to": t}
                  for (s, a), t in D.trans.items()],
    }


def afa_to_dot(A: AFA) -> str:
    lines = ["digraph afa {", "  rankdir=LR;"]
    for s in A.states:
        shape = "doublecircle" if s in A.finals else "circle"
        lines.append(f'  "{s}" [shape={shape}];')
    lines.append(f'  "__init" [shape=point]; "__init" -> "{A.initial}";')
    for k, ((s, letter), f) in enumerate(A.delta.items()):
        box = f"t{k}"
        lines.append(f'  "{box}" [shape=box, label="{format_tformula(f)}"];')
        lines.append(f'  "{s}" -> "{box}" [label="{_letter_text(letter)}"];')
        for a in sorted({a.name for a in atoms(f) if isinstance(a, Loc)}):
            lines.append(f'  "{box}" -> "{a}";')
    lines.append("}")
    return "\n".join(lines)


def dfa_to_dot(D: DFA) -> str:
    lines = ["digraph dfa {", "  rankdir=LR;"]
    for s in D.states:
        shape = "doublecircle" if s in D.finals else "circle"
        lines.append(f'  "{s}" [shape={shape}];')
    lines.append(f'  "__init" [shape=point]; "__init" -> "{D.initial}";')
    grouped = {}
    for (s, a), t in D.trans.items():
        grouped.setdefault((s, t), []).append(_letter_text(a))
    for (s, t), labels in grouped.items():
        lines.append(f'  "{s}" -> "{t}" [label="{" | ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines)
