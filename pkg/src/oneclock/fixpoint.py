"""Recursion in the logic: guardedness, equation systems and their unique solutions."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import networkx as nx

from .ata import ATA, Bot, complement, conj, disj, fresh_name, reset_closure
from .compiler import compile_formula
from .core import TimedWord, all_subsets, nonempty_subsets
from .errors import InputError, PreconditionError, UnguardedError
from .logic import (FALSE, TRUE, And, Atom, Evaluator, Formula, FRat, MODALITIES, Mu, Not, Nu, Or,
                    Prop, Rat, TrueF, URat, Var, format_formula, map_regex, parse_formula,
                    substitute)
from .parsing import Scanner


@dataclass
class EquationSystem:
    """Ordered equations Z_i = ψ_i; the first variable is the one asked about."""

    equations: list = field(default_factory=list)   # (name, body, flavor)

    @property
    def names(self):
        return [n for n, _, _ in self.equations]

    @property
    def bodies(self):
        return {n: b for n, b, _ in self.equations}

    def flavor(self, name):
        return {n: f for n, _, f in self.equations}[name]

    def __str__(self):
        return "\n".join(f"{n} ={fl} {format_formula(b)}" for n, b, fl in self.equations)

    def validate(self):
        names = set(self.names)
        if len(names) != len(self.equations):
            raise InputError("a variable is defined twice")
        for n, b, _ in self.equations:
            undefined = {v.name for v in _vars(b)} - names
            if undefined:
                raise InputError(f"{n} refers to undefined variables {sorted(undefined)}")
            if any(isinstance(x, (Mu, Nu)) for x in _nodes(b)):
                raise InputError(f"the body of {n} contains a fixpoint binder")
        return self


def _nodes(f):
    from .logic import walk
    return walk(f)


def _vars(f):
    return [n for n in _nodes(f) if isinstance(n, Var)]


def parse_system(text: str) -> EquationSystem:
    """Lines ``Z1 =mu phi`` / ``Z2 =nu phi`` / ``Z3 = phi`` (flavor mu); '#' starts a comment."""
    eqs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sc = Scanner(line)
        name = sc.ident("variable")
        if not name[0].isupper():
            raise InputError(f"equation variables start upper-case: {name!r}", lineno, 1)
        sc.expect("=")
        flavor = "mu"
        if sc.accept_word("mu"):
            flavor = "mu"
        elif sc.accept_word("nu"):
            flavor = "nu"
        body_text = line[sc.pos:]
        try:
            body = parse_formula(body_text, allow_free_vars=True)
        except InputError as exc:
            col = (exc.column or 1) + sc.pos
            raise InputError(str(exc.args[0]), lineno, col) from None
        eqs.append((name, body, flavor))
    if not eqs:
        raise InputError("empty equation system")
    return EquationSystem(eqs).validate()


def load_system(text: str) -> EquationSystem:
    """An equation system, or a single (possibly recursive) formula turned into one."""
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if lines and all(_looks_like_equation(l) for l in lines):
        return parse_system(text)
    return to_equations(eliminate_unguarded(parse_formula(" ".join(lines))))


def _looks_like_equation(line):
    import re
    return re.match(r"[A-Z][A-Za-z0-9_']*\s*=(mu|nu)?\s", line + " ") is not None


# guardedness ------------------------------------------------------------


def _unguarded(f, name):
    """Free occurrences of Var(name) in f that are not under a modality."""
    if isinstance(f, Var):
        return [f] if f.name == name else []
    if isinstance(f, MODALITIES):
        return []
    if isinstance(f, (Mu, Nu)):
        return [] if f.var == name else _unguarded(f.body, name)
    out = []
    for c in f.children():
        out += _unguarded(c, name)
    return out


def check_guarded(phi: Formula):
    """(guarded, offending binder variables)."""
    bad = []
    seen = set()

    def visit(f):
        if id(f) in seen:
            return
        seen.add(id(f))
        if isinstance(f, (Mu, Nu)) and _unguarded(f.body, f.var):
            bad.append(f.var)
        for c in f.children():
            visit(c)
        if isinstance(f, MODALITIES):
            for a in f.regex.atoms():
                visit(a)

    visit(phi)
    return not bad, bad


def _replace_unguarded(f, name, value):
    if isinstance(f, Var):
        return value if f.name == name else f
    if isinstance(f, MODALITIES):
        return f
    if isinstance(f, (Mu, Nu)):
        return f if f.var == name else type(f)(f.var, _replace_unguarded(f.body, name, value))
    if isinstance(f, Not):
        return Not(_replace_unguarded(f.arg, name, value))
    if isinstance(f, And):
        return And(_replace_unguarded(f.left, name, value), _replace_unguarded(f.right, name, value))
    if isinstance(f, Or):
        return Or(_replace_unguarded(f.left, name, value), _replace_unguarded(f.right, name, value))
    return f


def eliminate_unguarded(phi: Formula) -> Formula:
    """Unguarded μ-variables become false and unguarded ν-variables true."""
    def go(f):
        if isinstance(f, (Prop, TrueF, Var)):
            return f
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, Rat):
            return Rat(f.interval, map_regex(f.regex, go))
        if isinstance(f, FRat):
            return FRat(f.interval, map_regex(f.regex, go), go(f.arg))
        if isinstance(f, URat):
            return URat(f.interval, map_regex(f.regex, go), go(f.left), go(f.right))
        body = go(f.body)
        body = _replace_unguarded(body, f.var, FALSE if isinstance(f, Mu) else TRUE)
        return type(f)(f.var, body)
    return go(phi)


def to_equations(phi: Formula) -> EquationSystem:
    """One equation per binder (outermost first), plus a top equation when φ is not a binder."""
    ok, bad = check_guarded(phi)
    if not ok:
        raise UnguardedError(f"unguarded recursion variables {sorted(set(bad))}")
    taken = {n.var for n in _nodes(phi) if isinstance(n, (Mu, Nu))} | {
        n.name for n in _nodes(phi) if isinstance(n, Var)}
    eqs = []
    used = set()

    def fresh(base):
        name = base
        k = 1
        while name in used:
            k += 1
            name = f"{base}_{k}"
        used.add(name)
        return name

    def go(f, env):
        if isinstance(f, Var):
            return Var(env.get(f.name, f.name))
        if isinstance(f, (Prop, TrueF)):
            return f
        if isinstance(f, Not):
            return Not(go(f.arg, env))
        if isinstance(f, And):
            return And(go(f.left, env), go(f.right, env))
        if isinstance(f, Or):
            return Or(go(f.left, env), go(f.right, env))
        if isinstance(f, Rat):
            return Rat(f.interval, map_regex(f.regex, lambda a: go(a, env)))
        if isinstance(f, FRat):
            return FRat(f.interval, map_regex(f.regex, lambda a: go(a, env)), go(f.arg, env))
        if isinstance(f, URat):
            return URat(f.interval, map_regex(f.regex, lambda a: go(a, env)), go(f.left, env),
                        go(f.right, env))
        name = fresh(f.var)
        slot = len(eqs)
        eqs.append(None)
        body = go(f.body, {**env, f.var: name})
        eqs[slot] = (name, body, "mu" if isinstance(f, Mu) else "nu")
        return Var(name)

    if isinstance(phi, (Mu, Nu)):
        go(phi, {})
    else:
        top = fresh(fresh_name("Z", taken))
        eqs.append(None)
        eqs[0] = (top, go(phi, {}), "mu")
    return EquationSystem(eqs).validate()


def unguarded_graph(E: EquationSystem) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(E.names)
    for n, b, _ in E.equations:
        for m in E.names:
            if _unguarded(b, m):
                g.add_edge(n, m)
    return g


def check_system(E: EquationSystem):
    """Guardedness of a system: unguarded references between variables must not form a cycle."""
    g = unguarded_graph(E)
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return True, None
    return False, [u for u, _ in cyc] + [cyc[0][0]]


# evaluation -------------------------------------------------------------


@dataclass
class Solution:
    labels: dict        # variable -> list of bools per position
    verdict: bool       # value of the first variable at position 1

    def superstructure(self, word: TimedWord):
        return [set(p) | {z for z, vals in self.labels.items() if vals[i]}
                for i, (p, _) in enumerate(word)]


def evaluate_fixpoint(E: EquationSystem, word: TimedWord, verify: bool = True) -> Solution:
    """The unique solution of a guarded system, computed from the last position backwards."""
    ok, cyc = check_system(E)
    if not ok:
        raise UnguardedError(f"unguarded cycle {' -> '.join(cyc)}")
    ev = Evaluator(word, bodies=E.bodies)
    order = list(reversed(list(nx.topological_sort(unguarded_graph(E)))))
    n = len(word)
    labels = {z: [False] * n for z in E.names}
    for i in range(n, 0, -1):
        for z in order:
            labels[z][i - 1] = ev.value(E.bodies[z], i)
    if verify and not is_fixpoint(E, word, labels):
        raise AssertionError("backward evaluation did not produce a fixpoint")
    return Solution(labels, labels[E.names[0]][0])


def is_fixpoint(E: EquationSystem, word: TimedWord, labels) -> bool:
    sets = [{z for z in E.names if labels[z][i]} for i in range(len(word))]
    ev = Evaluator(word, labels=sets)
    return all(ev.value(E.bodies[z], i) == labels[z][i - 1]
               for z in E.names for i in range(1, len(word) + 1))


def brute_force_fixpoints(E: EquationSystem, word: TimedWord, cap: int = 1 << 16):
    """Every labeling that solves the system, by enumeration of all 2^(m·n) candidates."""
    m, n = len(E.names), len(word)
    if 1 << (m * n) > cap:
        raise PreconditionError(f"2^{m * n} labelings exceed the enumeration cap")
    out = []
    for bits in product((False, True), repeat=m * n):
        labels = {z: list(bits[k * n:(k + 1) * n]) for k, z in enumerate(E.names)}
        if is_fixpoint(E, word, labels):
            out.append(labels)
    return out


def extremal(fixpoints, least=True):
    """The least (or greatest) labeling among the given ones, or None if there is none."""
    for cand in fixpoints:
        if all(all((a <= b) if least else (a >= b) for z in cand for a, b in zip(cand[z], other[z]))
               for other in fixpoints):
            return cand
    return None


def brute_force_formula(phi: Formula, word: TimedWord, env=None):
    """Per-position truth of a formula with binders, each binder solved by enumeration
    and the least/greatest fixpoint picked by its flavor."""
    env = dict(env or {})
    n = len(word)
    if isinstance(phi, (Mu, Nu)):
        fixed = []
        for bits in product((False, True), repeat=n):
            vals = brute_force_formula(phi.body, word, {**env, phi.var: list(bits)})
            if vals == list(bits):
                fixed.append({phi.var: list(bits)})
        best = extremal(fixed, least=isinstance(phi, Mu))
        if best is None:
            raise PreconditionError("no extremal fixpoint (non-monotone body)")
        return best[phi.var]
    binders = {}
    taken = set(env)

    def lift(f):
        if isinstance(f, (Mu, Nu)):
            name = fresh_name("B", taken)
            taken.add(name)
            binders[name] = f
            return Var(name)
        if isinstance(f, (Prop, TrueF, Var)):
            return f
        if isinstance(f, Not):
            return Not(lift(f.arg))
        if isinstance(f, And):
            return And(lift(f.left), lift(f.right))
        if isinstance(f, Or):
            return Or(lift(f.left), lift(f.right))
        if isinstance(f, Rat):
            return Rat(f.interval, map_regex(f.regex, lift))
        if isinstance(f, FRat):
            return FRat(f.interval, map_regex(f.regex, lift), lift(f.arg))
        return URat(f.interval, map_regex(f.regex, lift), lift(f.left), lift(f.right))

    flat = lift(phi)
    for name, b in binders.items():
        env[name] = brute_force_formula(b, word, env)
    sets = [{z for z, vals in env.items() if vals[i]} for i in range(n)]
    ev = Evaluator(word, labels=sets)
    return [ev.value(flat, i) for i in range(1, n + 1)]


def evaluate_sentence(phi: Formula, word: TimedWord, i: int = 1) -> bool:
    """Truth at position i of a formula that may contain fixpoint binders."""
    E = to_equations(eliminate_unguarded(phi))
    sol = evaluate_fixpoint(E, word)
    return sol.labels[E.names[0]][i - 1]


# automata and equation systems -------------------------------------------


def _var_name(header, taken):
    base = "X_" + "".join(c if c.isalnum() else "_" for c in header)
    name = fresh_name(base, taken)
    taken.add(name)
    return name


def solve_ata_via_equations(A: ATA, frat=None) -> EquationSystem:
    """An equation system whose first variable holds at position 1 iff A accepts.

    Every island contributes one variable (its behaviour read after a reset into
    its header); reset cycles become recursion, so A need not have loop-free resets.
    """
    from .decompiler import _dual_island, disjunctive_formula, island_formula, strip_resets
    from .structure import cd_partition, decompose
    N, dec = decompose(A)
    part = cd_partition(N) if frat is not False else None
    if frat and part is None:
        raise PreconditionError("FRat bodies need a conjunctive-disjunctive automaton")
    use_frat = part is not None and frat is not False
    taken = set()
    top = _var_name("init", taken)
    names = {h: _var_name(h, taken) for h in dec.headers}
    props = {h: "w_" + "".join(c if c.isalnum() else "_" for c in h).lower() for h in dec.headers}
    taken_props = set(N.alphabet)
    for h in dec.headers:
        props[h] = fresh_name(props[h], taken_props)
        taken_props.add(props[h])

    def body(i, anchored):
        h = dec.headers[i]
        plan = strip_resets(N, dec.islands[i], h, props)
        if use_frat:
            if h in part[0]:
                f = Not(disjunctive_formula(_dual_island(plan.automaton, plan.valid), plan.valid, anchored))
            else:
                f = disjunctive_formula(plan.automaton, plan.valid, anchored)
        else:
            f, _ = island_formula(plan, anchored)
        return substitute(f, {props[p]: Var(names[p]) for p in plan.witnesses})

    root = dec.headers.index(N.initial)
    eqs = [(top, body(root, True), "mu")]
    for i, h in enumerate(dec.headers):
        eqs.append((names[h], body(i, False), "mu"))
    return EquationSystem(eqs).validate()


def inline_unguarded(E: EquationSystem) -> EquationSystem:
    """Substitute bodies for unguarded references (they must be acyclic)."""
    ok, cyc = check_system(E)
    if not ok:
        raise UnguardedError(f"unguarded cycle {' -> '.join(cyc)}")
    g = unguarded_graph(E)
    done = {}
    for z in reversed(list(nx.topological_sort(g))):
        b = E.bodies[z]
        done[z] = _inline(b, {m: done[m] for m in g.successors(z)})
    return EquationSystem([(z, done[z], fl) for z, _, fl in E.equations])


def _inline(f, mapping):
    if not mapping:
        return f
    if isinstance(f, Var):
        return mapping.get(f.name, f)
    if isinstance(f, MODALITIES) or isinstance(f, (Prop, TrueF)):
        return f
    if isinstance(f, Not):
        return Not(_inline(f.arg, mapping))
    if isinstance(f, And):
        return And(_inline(f.left, mapping), _inline(f.right, mapping))
    if isinstance(f, Or):
        return Or(_inline(f.left, mapping), _inline(f.right, mapping))
    raise TypeError(f)


def compile_equations(E: EquationSystem, alphabet=None) -> ATA:
    """One automaton for the first variable of a system, recursion turned into resets.

    Every body is compiled with its variables read as props; each variable is
    then discharged by reset jumps into its own automaton or the complement.
    The result may have reset cycles.
    """
    E = inline_unguarded(E)
    base = set()
    for _, b, _ in E.equations:
        base |= {n.name for n in _nodes(b) if isinstance(n, Prop)}
    sigma = frozenset(alphabet) if alphabet is not None else frozenset(base) or frozenset({"p"})
    taken = set(sigma)
    zprop = {}
    for z in E.names:
        zprop[z] = fresh_name("v" + z.lower(), taken)
        taken.add(zprop[z])
    ext = sigma | set(zprop.values())
    pos, neg = {}, {}
    for k, (z, b, _) in enumerate(E.equations):
        C = compile_formula(substitute(b, {v: Prop(p) for v, p in zprop.items()}), ext)
        pos[z] = C.prefixed(f"e{k + 1}:")
        neg[z] = complement(C).prefixed(f"n{k + 1}:")
    zs = list(E.names)
    props = [zprop[z] for z in zs]
    anchors = {}
    for z in zs:
        for tag, A in (("+", pos[z]), ("-", neg[z])):
            for S in nonempty_subsets(sigma):
                vals = {reset_closure(A.transition(A.initial, S | T)) for T in all_subsets(props)}
                if len(vals) != 1:
                    raise UnguardedError(f"the first step of {z} depends on recursion variables")
                anchors[(z, tag, S)] = vals.pop()
    delta, locations, finals = {}, [], set()
    for A in [pos[z] for z in zs] + [neg[z] for z in zs]:
        locations += A.locations
        finals |= A.finals
        for s in A.locations:
            for S in nonempty_subsets(sigma):
                table = {T: A.transition(s, S | T) for T in all_subsets(props)}
                relevant = [z for z in zs if any(table[T] != table[T ^ {zprop[z]}] for T in table)]
                pieces = []
                for bits in product((False, True), repeat=len(relevant)):
                    T = frozenset(zprop[z] for z, b in zip(relevant, bits) if b)
                    guard = conj(*(anchors[(z, "+" if b else "-", S)] for z, b in zip(relevant, bits)))
                    pieces.append(conj(table[T], guard))
                f = disj(*pieces)
                if not isinstance(f, Bot):
                    delta[(s, S)] = f
    first = pos[zs[0]]
    return ATA(sigma, locations, first.initial, finals, delta, check=False).reachable()
