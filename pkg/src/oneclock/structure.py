"""Normal form, island decomposition and the structural classifiers (lfr, C⊕D, PO)."""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .ata import (ATA, Loc, ResetLoc, Clock, free_locations, reset_locations, substitute_locs,
                  to_cnf, to_dnf)
from .errors import NotLoopFreeError


@dataclass
class IslandDecomposition:
    islands: list                      # list of frozensets of locations
    headers: list                      # headers[i] is the header of islands[i]
    reset_edges: set = field(default_factory=set)   # (i, j) pairs

    @property
    def island_of(self):
        return {s: i for i, isl in enumerate(self.islands) for s in isl}

    def index_of_header(self, header):
        return self.headers.index(header)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.islands)))
        g.add_edges_from(self.reset_edges)
        return g

    def to_json(self, A=None):
        order = list(A.locations) if A is not None else None

        def sort(isl):
            return sorted(isl, key=order.index) if order else sorted(isl)
        return [{"header": h, "locations": sort(isl)} for h, isl in zip(self.headers, self.islands)]


def _free_closure(A: ATA, start):
    seen, todo = {start}, [start]
    while todo:
        s = todo.pop()
        free, _ = A.successors(s)
        for p in free:
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


def check_normal_form(A: ATA):
    """(is_normal, decomposition or None).

    Islands are the free-move closures of the headers, where the headers are the
    initial location and every reset target.  A free move may return to its own
    island's header but never enters another island.  Unreachable locations are
    ignored.
    """
    A = A.reachable()
    headers = [A.initial]
    for s in A.locations:
        _, reset = A.successors(s)
        for p in sorted(reset, key=A.locations.index):
            if p not in headers:
                headers.append(p)
    headers.sort(key=A.locations.index)
    owner = {}
    islands = []
    for i, h in enumerate(headers):
        isl = _free_closure(A, h)
        for s in isl:
            if s in owner or (s in headers and s != h):
                return False, None
            owner[s] = i
        islands.append(frozenset(isl))
    edges = set()
    for s in A.locations:
        _, reset = A.successors(s)
        for p in reset:
            edges.add((owner[s], headers.index(p)))
    return True, IslandDecomposition(islands, headers, edges)


def is_normal(A: ATA) -> bool:
    return check_normal_form(A)[0]


def normalize(A: ATA) -> ATA:
    """Island-separating copy construction; automata already in normal form are returned as is."""
    if check_normal_form(A)[0]:
        return A.reachable()
    index = {s: k for k, s in enumerate(A.locations)}

    def r(s):
        return f"{s}^r"

    def nr(s, j):
        return f"{s}^nr{j}"

    init = r(A.initial)
    origin = {init: (A.initial, index[A.initial])}
    delta, order, todo = {}, [init], [init]

    def enter(name, base, island):
        if name not in origin:
            origin[name] = (base, island)
            order.append(name)
            todo.append(name)

    while todo:
        name = todo.pop(0)
        s, island = origin[name]
        for letter in A.letters():
            g = substitute_locs(A.transition(s, letter),
                                lambda p: Loc(nr(p, island)), lambda p: ResetLoc(r(p)))
            delta[(name, letter)] = g
            for p in free_locations(A.transition(s, letter)):
                enter(nr(p, island), p, island)
            for p in reset_locations(A.transition(s, letter)):
                enter(r(p), p, index[p])
    finals = {n for n in order if origin[n][0] in A.finals}
    return ATA(A.alphabet, order, init, finals, delta, check=False)


def decompose(A: ATA):
    """Normal form plus its island decomposition."""
    N = normalize(A)
    ok, dec = check_normal_form(N)
    assert ok, "normalization must produce normal form"
    return N, dec


def reset_cycle(A: ATA):
    """A cycle of islands (as header names) linked by resets, or None."""
    N, dec = decompose(A)
    try:
        cyc = nx.find_cycle(dec.graph())
    except nx.NetworkXNoCycle:
        return None
    return [dec.headers[u] for u, _ in cyc] + [dec.headers[cyc[0][0]]]


def check_lfr(A: ATA) -> bool:
    _, dec = decompose(A)
    return nx.is_directed_acyclic_graph(dec.graph())


def island_order(A: ATA):
    """Islands of Norm(A), leaves of the reset DAG first."""
    N, dec = decompose(A)
    g = dec.graph()
    if not nx.is_directed_acyclic_graph(g):
        raise NotLoopFreeError(reset_cycle(A))
    order = list(reversed(list(nx.lexicographical_topological_sort(g))))
    return N, dec, order


# conjunctive / disjunctive shapes -------------------------------------------


def _clause_ok(clause):
    locs = [a for a in clause if isinstance(a, Loc)]
    clocks = [a for a in clause if isinstance(a, Clock)]
    return len(locs) <= 1 and not (locs and clocks)


def disjunctive_shape(f):
    """(fits, free successors) for the DNF shapes allowed in disjunctive locations."""
    clauses = to_dnf(f)
    ok = all(_clause_ok(c) for c in clauses)
    return ok, {a.name for c in clauses for a in c if isinstance(a, Loc)}


def conjunctive_shape(f):
    clauses = to_cnf(f)
    ok = all(_clause_ok(c) for c in clauses)
    return ok, {a.name for c in clauses for a in c if isinstance(a, Loc)}


def cd_partition(A: ATA):
    """Search a (conjunctive, disjunctive) split of A's own locations, or None."""
    allowed, succ = {}, {}
    for s in A.locations:
        modes = {}
        for mode, shape in (("and", conjunctive_shape), ("or", disjunctive_shape)):
            ok, nxt = True, set()
            for letter in A.letters():
                fits, free = shape(A.transition(s, letter))
                if not fits:
                    ok = False
                    break
                nxt |= free
            if ok:
                modes[mode] = nxt
        allowed[s] = modes
        succ[s] = modes
    assign = {}

    def propagate(s, mode, assign):
        todo = [(s, mode)]
        while todo:
            s, mode = todo.pop()
            if s in assign:
                if assign[s] != mode:
                    return False
                continue
            if mode not in allowed[s]:
                return False
            assign[s] = mode
            for p in succ[s][mode]:
                todo.append((p, mode))
        return True

    def search(assign):
        free = [s for s in A.locations if s not in assign]
        if not free:
            return assign
        s = free[0]
        for mode in ("or", "and"):
            trial = dict(assign)
            if propagate(s, mode, trial):
                done = search(trial)
                if done is not None:
                    return done
        return None

    result = search(assign)
    if result is None:
        return None
    conj = frozenset(s for s, m in result.items() if m == "and")
    return conj, frozenset(A.locations) - conj


def validate_cd_partition(A: ATA, partition) -> bool:
    conj, disj = partition
    for s in A.locations:
        shape = conjunctive_shape if s in conj else disjunctive_shape
        own = conj if s in conj else disj
        for letter in A.letters():
            fits, free = shape(A.transition(s, letter))
            if not fits or not free <= own:
                return False
    return True


def check_cd(A: ATA):
    """(is_cd, partition of Norm(A) or None)."""
    N = normalize(A)
    part = cd_partition(N)
    return part is not None, part


def cd_violation(A: ATA):
    """A (location, letter, reason) triple explaining why A is not C⊕D."""
    N = normalize(A)
    for s in N.locations:
        for letter in N.letters():
            f = N.transition(s, letter)
            if not disjunctive_shape(f)[0] and not conjunctive_shape(f)[0]:
                return s, letter, "a clause mixes a free location with a clock constraint or several free locations"
    return None, None, "free moves link conjunctive and disjunctive locations"


def check_po(A: ATA) -> bool:
    g = nx.DiGraph()
    g.add_nodes_from(A.locations)
    for s in A.locations:
        free, reset = A.successors(s)
        if s in reset:
            return False
        g.add_edges_from((s, p) for p in free | reset if p != s)
    return nx.is_directed_acyclic_graph(g)


def classify(A: ATA) -> dict:
    N, dec = decompose(A)
    cd, _ = check_cd(A)
    return {
        "normal": is_normal(A),
        "lfr": nx.is_directed_acyclic_graph(dec.graph()),
        "cd": cd,
        "po": check_po(A),
        "islands": dec.to_json(N),
    }
