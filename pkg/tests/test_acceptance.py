"""The eight acceptance criteria, each with its agreement target and time budget pinned.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import random
import time

from conftest import ACCEPTANCE, corpus_ata, corpus_formula, corpus_path, corpus_word

from oneclock.ata import accepts
from oneclock.compiler import compile_formula, compile_frat
from oneclock.core import region_word_of
from oneclock.decompiler import decompile, decompile_frat
from oneclock.fixpoint import (brute_force_fixpoints, compile_equations, evaluate_fixpoint,
                               evaluate_sentence, is_fixpoint, solve_ata_via_equations)
from oneclock.generators import (random_cd_ata, random_formula, random_lfr_ata, random_reset_free_ata,
                                 random_system, random_word, random_words)
from oneclock.logic import Rat, URat, evaluate, walk
from oneclock.qkmso import eval_mso, fratmtl_to_q2mso, metric_depth, parse_qformula, ratmtl_to_qkmso
from oneclock.structure import check_cd, check_lfr, classify, normalize
from oneclock.untiming import afa_accepts, afa_to_dfa, synthesize_ratmtl, untime

# pinned targets: agreement must be exact, budgets in seconds
REQUIRED_AGREEMENT = 1.0
BUDGET = {1: 1, 2: 60, 3: 120, 4: 600, 5: 600, 6: 300, 7: 600, 8: 600}


class Tally:
    def __init__(self):
        self.total = 0
        self.agree = 0
        self.failures = []

    def check(self, ok, what):
        self.total += 1
        if ok:
            self.agree += 1
        elif len(self.failures) < 5:
            self.failures.append(what)

    @property
    def rate(self):
        return self.agree / self.total if self.total else 0.0


def record(n, title, tally, start):
    elapsed = time.perf_counter() - start
    ok = tally.rate >= REQUIRED_AGREEMENT and elapsed < BUDGET[n]
    status = "PASS" if ok else "FAIL"
    line = (f"criterion {n} [{status}] {title}: {tally.agree}/{tally.total} agree, "
            f"{elapsed:.1f}s (budget {BUDGET[n]}s)")
    ACCEPTANCE[n] = line
    print(line)
    assert tally.rate >= REQUIRED_AGREEMENT, f"{line}; first failures: {tally.failures}"
    assert elapsed < BUDGET[n], line


def test_criterion_1_golden_corpus():
    start = time.perf_counter()
    t = Tally()
    pu = corpus_formula("pair_until")
    t.check(evaluate(pu, corpus_word("pair_until_yes")) is True, "pair until, accepted word")
    t.check(evaluate(pu, corpus_word("pair_until_no")) is False, "pair until, rejected word")
    nr = corpus_formula("nested_rat")
    t.check(evaluate(nr, corpus_word("nested_rat_yes")) is True, "nested Rat, accepted word")
    t.check(evaluate(nr, corpus_word("nested_rat_no")) is False, "nested Rat, rejected word")
    tb = parse_qformula(corpus_path("time_block.qmso").read_text())
    t.check(eval_mso(tb, corpus_word("time_block"), {"x": 1}) is True, "time-constraint block")
    br = parse_qformula(corpus_path("bounded_response.qmso").read_text())
    t.check(metric_depth(br) == 2, "metric depth of bounded response")
    mc = corpus_formula("mu_chain")
    t.check(evaluate_sentence(mc, corpus_word("mu_chain_five")) is False, "mu chain, five points")
    t.check(evaluate_sentence(mc, corpus_word("mu_chain_four")) is True, "mu chain, four points")
    mf = corpus_formula("mu_frat")
    t.check(evaluate_sentence(mf, corpus_word("mu_frat_yes")) is True, "mu FRat, accepted word")
    t.check(evaluate_sentence(mf, corpus_word("mu_frat_no")) is False, "mu FRat, rejected word")
    expected = {"cd_a": (True, False), "cd_b": (False, None), "cd_c": (False, True),
                "cd_d": (False, True)}
    for name, (cd, lfr) in expected.items():
        c = classify(corpus_ata(name))
        t.check(c["cd"] == cd and (lfr is None or c["lfr"] == lfr), f"classification of {name}")
    t.check(classify(corpus_ata("reset_cycle"))["lfr"] is False, "reset cycle not lfr")
    t.check(classify(corpus_ata("po"))["po"] is True, "PO automaton classified PO")
    B = corpus_ata("B")
    t.check(classify(B)["normal"] is False, "B not normal")
    nb = classify(normalize(B))
    t.check(nb["normal"] is True and len(nb["islands"]) == 3, "Norm(B) normal with three islands")
    record(1, "golden corpus", t, start)


def test_criterion_2_untiming():
    start = time.perf_counter()
    rng = random.Random(2)
    t = Tally()
    for k in range(20):
        P = random_reset_free_ata(rng, "ab", n_locs=rng.randint(1, 4), c_max=rng.randint(1, 2))
        afa = untime(P)
        for w in random_words(rng, "ab", 500, max_len=6):
            t.check(accepts(P, w) == afa_accepts(afa, region_word_of(w, afa.c_max)), (k, w))
    record(2, "untiming (20 automata x 500 words)", t, start)


def test_criterion_3_synthesis_and_normal_form():
    start = time.perf_counter()
    rng = random.Random(3)
    t = Tally()
    for k in range(10):
        P = random_reset_free_ata(rng, "ab", n_locs=rng.randint(1, 3), c_max=rng.randint(1, 2))
        phi = synthesize_ratmtl(afa_to_dfa(untime(P)))
        for w in random_words(rng, "ab", 500, max_len=6):
            t.check(evaluate(phi, w) == accepts(P, w), ("synth", k, w))
    for k in range(10):
        A = random_lfr_ata(rng, "ab") if k % 2 else random_cd_ata(rng, "ab")
        N = normalize(A)
        for w in random_words(rng, "ab", 500, max_len=6):
            t.check(accepts(N, w) == accepts(A, w), ("norm", k, w))
    record(3, "synthesis and normal form (20 instances x 500 words)", t, start)


def test_criterion_4_compile_and_decompile():
    start = time.perf_counter()
    rng = random.Random(4)
    t = Tally()
    for k in range(200):
        phi = random_formula(rng, "ab", max_md=2)
        A = compile_formula(phi, "ab")
        t.check(check_lfr(A), ("compile not lfr", str(phi)))
        for w in random_words(rng, "ab", 100, max_len=6):
            t.check(accepts(A, w) == evaluate(phi, w), (str(phi), w))
    corpus = [corpus_ata("po"), corpus_ata("three_islands")] + [random_lfr_ata(rng, "ab") for _ in range(8)]
    for k, A in enumerate(corpus):
        phi = decompile(A)
        for w in random_words(rng, sorted(A.alphabet), 300, max_len=6):
            t.check(evaluate(phi, w) == accepts(A, w), ("decompile", k, w))
    record(4, "compile (200 x 100) and decompile (10 x 300)", t, start)


def test_criterion_5_frat_fragment():
    start = time.perf_counter()
    rng = random.Random(5)
    t = Tally()
    for k in range(50):
        phi = random_formula(rng, "ab", max_md=2, fragment="fratmtl")
        A = compile_frat(phi, "ab")
        t.check(check_cd(A)[0] and check_lfr(A), ("not cd/lfr", str(phi)))
        for w in random_words(rng, "ab", 200, max_len=6):
            t.check(accepts(A, w) == evaluate(phi, w), (str(phi), w))
    for k in range(10):
        A = random_cd_ata(rng, "ab")
        phi = decompile_frat(A)
        t.check(not any(isinstance(n, (Rat, URat)) for n in walk(phi)), ("Rat in output", k))
        for w in random_words(rng, "ab", 200, max_len=6):
            t.check(evaluate(phi, w) == accepts(A, w), ("decompile_frat", k, w))
    record(5, "FRat compile (50 x 200) and decompile_frat (10 x 200)", t, start)


def test_criterion_6_unique_fixpoint():
    start = time.perf_counter()
    rng = random.Random(6)
    t = Tally()
    for k in range(20):
        E = random_system(rng, "ab", n_vars=rng.randint(1, 2))
        for w in [random_word(rng, "ab", n) for n in range(1, 7) for _ in range(2)]:
            sol = evaluate_fixpoint(E, w)
            t.check(is_fixpoint(E, w, sol.labels), ("backward pass", k, w))
            for z in E.names:
                for i in range(len(w)):
                    labels = {y: list(v) for y, v in sol.labels.items()}
                    labels[z][i] = not labels[z][i]
                    t.check(not is_fixpoint(E, w, labels), ("mutation survived", k, z, i, w))
            if len(w) <= 5:
                fps = brute_force_fixpoints(E, w)
                t.check(len(fps) == 1 and fps[0] == sol.labels, ("brute force", k, w, len(fps)))
    record(6, "uniqueness (20 systems, words up to length 6)", t, start)


def test_criterion_7_equation_systems():
    start = time.perf_counter()
    rng = random.Random(7)
    t = Tally()
    for name in ("cd_a", "B", "reset_cycle", "po", "three_islands", "cd_b", "cd_c", "cd_d"):
        A = corpus_ata(name)
        E = solve_ata_via_equations(A)
        for w in random_words(rng, sorted(A.alphabet), 200, max_len=6):
            t.check(evaluate_fixpoint(E, w).verdict == accepts(A, w), (name, w))
    for k in range(30):
        E = random_system(rng, "ab", n_vars=rng.randint(1, 2))
        C = compile_equations(E, "ab")
        for w in random_words(rng, "ab", 200, max_len=6):
            t.check(accepts(C, w) == evaluate_fixpoint(E, w).verdict, (str(E), w))
    record(7, "solve_ata_via_equations on 8 automata and compile_equations (30 x 200)", t, start)


def test_criterion_8_qkmso_translations():
    start = time.perf_counter()
    rng = random.Random(8)
    t = Tally()
    for k in range(30):
        fragment = "fratmtl" if k % 2 else "ratmtl"
        phi = random_formula(rng, "abc", max_md=2, max_size=10, fragment=fragment)
        psi = ratmtl_to_qkmso(phi)
        chi = fratmtl_to_q2mso(phi) if fragment == "fratmtl" else None
        for w in random_words(rng, "abc", 100, max_len=6):
            want = evaluate(phi, w)
            t.check(eval_mso(psi, w, {"t0": 1}) == want, ("qkmso", str(phi), w))
            if chi is not None:
                t.check(eval_mso(chi, w, {"t0": 1}) == want, ("q2mso", str(phi), w))
    record(8, "QkMSO / Q2MSO translations (30 formulas x 100 words)", t, start)
