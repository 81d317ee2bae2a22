"""Differential testing: every translation against its oracle on random instances."""
from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .ata import ATA, accepts
from .compiler import compile_formula, compile_frat
from .core import TimedWord, format_rational, region_word_of
from .decompiler import decompile, decompile_frat
from .errors import PreconditionError, ResourceError
from .fixpoint import (brute_force_fixpoints, compile_equations,
                       evaluate_fixpoint, solve_ata_via_equations)
from .generators import (props_for, random_cd_ata, random_formula, random_lfr_ata,
                         random_reset_free_ata, random_system, random_words)
from .logic import (FALSE, TRUE, And, Atom, Concat, FRat, Formula, Not, Or, Prop, Rat, Star, URat,
                    Union, evaluate, walk)
from .qkmso import eval_mso, fratmtl_to_q2mso, ratmtl_to_qkmso
from .structure import normalize
from .untiming import afa_accepts, afa_to_dfa, dfa_accepts, synthesize_ratmtl, untime

MODES = ("compile", "frat", "decompile", "decompile-frat", "untime", "synthesize", "normalize",
         "fixpoint", "equations", "ata-equations", "mso", "q2mso")


@dataclass
class Disagreement:
    index: int
    subject: str
    word: list
    expected: object
    got: object

    def to_json(self):
        return {"index": self.index, "subject": self.subject, "word": self.word,
                "expected": self.expected, "got": self.got}


@dataclass
class Report:
    mode: str
    seed: int
    count: int
    agree: int = 0
    resource: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)

    def to_json(self):
        return {"mode": self.mode, "seed": self.seed, "count": self.count, "agree": self.agree,
                "resource_caps": [{"index": i, "error": e} for i, e in self.resource],
                "disagreements": [d.to_json() for d in self.disagreements]}

    def text(self):
        lines = [f"{self.agree}/{self.count} agree"]
        if self.resource:
            lines.append(f"{len(self.resource)} instance(s) hit a resource cap")
            lines += [f"  #{i}: {e}" for i, e in self.resource]
        for d in self.disagreements:
            lines.append(f"disagreement on instance #{d.index}:")
            lines.append(f"  subject: {d.subject}")
            lines.append(f"  word: {json.dumps(d.word)}")
            lines.append(f"  oracle: {d.expected}  translation: {d.got}")
        return "\n".join(lines)


# instances: (subject, subject text, oracle(word), route(word)) -------------------


def _formula_instance(rng, props, mode, max_md):
    fragment = "fratmtl" if mode in ("frat", "q2mso") else "ratmtl"
    phi = random_formula(rng, props, max_md=max_md, fragment=fragment)
    return phi


def _routes(mode, subject, props):
    """(oracle, translation) callables on words for a subject of the given mode."""
    if mode in ("compile", "frat"):
        A = (compile_frat if mode == "frat" else compile_formula)(subject, props)
        return (lambda w: evaluate(subject, w)), (lambda w: accepts(A, w))
    if mode in ("mso", "q2mso"):
        psi = (fratmtl_to_q2mso if mode == "q2mso" else ratmtl_to_qkmso)(subject)
        return (lambda w: evaluate(subject, w)), (lambda w: eval_mso(psi, w, {"t0": 1}))
    if mode in ("decompile", "decompile-frat"):
        phi = (decompile_frat if mode == "decompile-frat" else decompile)(subject)
        return (lambda w: accepts(subject, w)), (lambda w: evaluate(phi, w))
    if mode == "untime":
        P = untime(subject)
        return (lambda w: accepts(subject, w)), (lambda w: afa_accepts(P, region_word_of(w, P.c_max)))
    if mode == "synthesize":
        D = afa_to_dfa(untime(subject))
        phi = synthesize_ratmtl(D)
        return (lambda w: dfa_accepts(D, region_word_of(w, D.c_max))), (lambda w: evaluate(phi, w))
    if mode == "normalize":
        N = normalize(subject)
        return (lambda w: accepts(subject, w)), (lambda w: accepts(N, w))
    if mode == "ata-equations":
        E = solve_ata_via_equations(subject)
        return (lambda w: accepts(subject, w)), (lambda w: evaluate_fixpoint(E, w).verdict)
    if mode == "equations":
        C = compile_equations(subject, props)
        return (lambda w: evaluate_fixpoint(subject, w).verdict), (lambda w: accepts(C, w))
    if mode == "fixpoint":
        def oracle(w):
            fps = brute_force_fixpoints(subject, w)
            return _labels_text(fps[0]) if len(fps) == 1 else f"{len(fps)} fixpoints"
        return oracle, (lambda w: _labels_text(evaluate_fixpoint(subject, w, verify=False).labels))
    raise ValueError(f"unknown mode {mode}")


def _labels_text(labels):
    return " ".join(f"{z}:" + "".join("1" if b else "0" for b in v) for z, v in sorted(labels.items()))


def _subject(rng, mode, props, max_md):
    if mode in ("compile", "frat", "mso", "q2mso"):
        return _formula_instance(rng, props, mode, max_md)
    if mode in ("decompile", "normalize"):
        return random_lfr_ata(rng, props)
    if mode == "decompile-frat":
        return random_cd_ata(rng, props)
    if mode in ("untime", "synthesize"):
        return random_reset_free_ata(rng, props, n_locs=rng.randint(1, 4), c_max=rng.randint(1, 2))
    if mode == "ata-equations":
        return random_lfr_ata(rng, props) if rng.random() < 0.5 else random_cd_ata(rng, props)
    if mode in ("fixpoint", "equations"):
        return random_system(rng, props, n_vars=rng.randint(1, 2))
    raise ValueError(f"unknown mode {mode}")


def _subject_text(subject):
    if isinstance(subject, ATA):
        return json.dumps(subject.to_json(), sort_keys=True)
    return str(subject)


def run_instance(mode, seed, index, words, word_len, alphabet_size, max_md=2, shrink=True):
    """One instance: (status, payload) with status "agree", "resource" or "disagree"."""
    rng = random.Random(f"{seed}:{mode}:{index}")
    props = props_for(alphabet_size)
    try:
        subject = _subject(rng, mode, props, max_md)
        oracle, route = _routes(mode, subject, props)
        for w in random_words(rng, props, words, max_len=word_len):
            want, got = oracle(w), route(w)
            if want != got:
                if shrink:
                    subject, w = shrink_counterexample(
                        subject, w, lambda f, v: _disagrees(mode, f, v, props))
                    oracle, route = _routes(mode, subject, props)
                    want, got = oracle(w), route(w)
                return "disagree", Disagreement(index, _subject_text(subject), w.to_json(), want, got)
    except (ResourceError, PreconditionError) as exc:
        return "resource", str(exc)
    return "agree", None


def difftest(mode, seed=0, count=50, words=20, word_len=6, alphabet_size=2, max_md=2, jobs=1):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode}; choose from {', '.join(MODES)}")
    if mode == "fixpoint":
        word_len = min(word_len, 5)
    args = [(mode, seed, i, words, word_len, alphabet_size, max_md) for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_run_packed, args))
    else:
        results = [_run_packed(a) for a in args]
    report = Report(mode, seed, count)
    # results are indexed by instance, so the report does not depend on scheduling
    for i, (status, payload) in enumerate(results):
        if status == "agree":
            report.agree += 1
        elif status == "resource":
            report.resource.append((i, payload))
        else:
            report.disagreements.append(payload)
    return report


def _run_packed(args):
    return run_instance(*args)


# shrinking ----------------------------------------------------------------------


def _disagrees(mode, subject, word, props):
    try:
        oracle, route = _routes(mode, subject, props)
        return oracle(word) != route(word)
    except (ResourceError, PreconditionError, ValueError):
        return False


def shrink_counterexample(subject, word, disagrees):
    """Greedy delta debugging on word length, letter size and (for formulas) formula size.

    ``disagrees(subject, word)`` is the failure predicate; every accepted step
    keeps it true, so the result still disagrees.
    """
    changed = True
    while changed:
        changed = False
        for w in _smaller_words(word):
            if _word_size(w) < _word_size(word) and disagrees(subject, w):
                word, changed = w, True
                break
        if changed:
            continue
        if isinstance(subject, Formula):
            size = _formula_size(subject)
            for f in _smaller_formulas(subject):
                if _formula_size(f) < size and disagrees(f, word):
                    subject, changed = f, True
                    break
    return subject, word


def _word_size(word):
    return (len(word), sum(len(p) for p in word.props))


def _formula_size(f):
    return sum(1 for _ in walk(f))


def _smaller_words(word: TimedWord):
    letters = list(word)
    n = len(letters)
    # drop chunks first (ddmin style), then single letters, then props
    size = n // 2
    while size >= 1:
        for start in range(0, n, size):
            rest = letters[:start] + letters[start + size:]
            if rest:
                base = rest[0][1]
                yield TimedWord((p, t - base) for p, t in rest)
        size //= 2
    for i, (p, t) in enumerate(letters):
        if len(p) > 1:
            for q in sorted(p):
                yield TimedWord(letters[:i] + [(p - {q}, t)] + letters[i + 1:])


def _smaller_formulas(f):
    yield TRUE
    yield FALSE
    yield from _children(f)
    for i, g in enumerate(_children(f)):
        for h in _smaller_formulas(g):
            out = _replace_child(f, i, h)
            if out is not None:
                yield out


def _children(f):
    if isinstance(f, Not):
        return [f.arg]
    if isinstance(f, (And, Or)):
        return [f.left, f.right]
    if isinstance(f, FRat):
        return [f.arg] + _regex_atoms(f.regex)
    if isinstance(f, URat):
        return [f.left, f.right] + _regex_atoms(f.regex)
    if isinstance(f, Rat):
        return _regex_atoms(f.regex)
    return []


def _regex_atoms(r):
    return [a for a in r.atoms() if isinstance(a, Formula) and not isinstance(a, Prop)]


def _replace_child(f, i, h):
    if isinstance(f, Not):
        return Not(h)
    if isinstance(f, (And, Or)):
        return type(f)(h, f.right) if i == 0 else type(f)(f.left, h)
    if isinstance(f, FRat) and i == 0:
        return FRat(f.interval, f.regex, h)
    if isinstance(f, URat) and i < 2:
        return URat(f.interval, f.regex, h, f.right) if i == 0 else URat(f.interval, f.regex, f.left, h)
    # a regex atom: replace its k-th occurrence
    k = i - (1 if isinstance(f, FRat) else 2 if isinstance(f, URat) else 0)
    target = _regex_atoms(f.regex)[k]
    regex = _swap_atom(f.regex, target, h)
    if isinstance(f, FRat):
        return FRat(f.interval, regex, f.arg)
    if isinstance(f, URat):
        return URat(f.interval, regex, f.left, f.right)
    return Rat(f.interval, regex)


def _swap_atom(r, target, new):
    if isinstance(r, Atom):
        return Atom(new) if r.formula == target else r
    if isinstance(r, (Concat, Union)):
        return type(r)(_swap_atom(r.left, target, new), _swap_atom(r.right, target, new))
    if isinstance(r, Star):
        return Star(_swap_atom(r.arg, target, new))
    return r


def word_text(word: TimedWord) -> str:
    return " ".join("({" + ",".join(sorted(p)) + "}," + format_rational(t) + ")" for p, t in word)
