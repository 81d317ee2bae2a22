"""Command-line front end.

Exit codes: 0 success, 1 property violation, 2 input or precondition error,
3 resource cap.  Errors are reported as JSON objects on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .ata import ATA, accepts
from .compiler import compile_formula, compile_frat
from .core import TimedWord
from .decompiler import decompile, decompile_frat
from .difftest import MODES, difftest
from .errors import InputError, OneClockError, PreconditionError, ResourceError
from .fixpoint import eliminate_unguarded, evaluate_fixpoint, load_system, to_equations
from .logic import has_fixpoints, parse_formula, props_of, truth_table
from .qkmso import (eval_mso, format_qformula, fratmtl_to_q2mso, free_fo, free_so, is_first_order,
                    metric_depth, parse_qformula, ratmtl_to_qkmso)
from .structure import classify, normalize
from .untiming import afa_to_dfa, afa_to_dot, dfa_to_dot, dfa_to_json, synthesize_ratmtl, untime


class PropertyViolation(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON in {what}: {exc.msg}", exc.lineno, exc.colno) from None


def read_automaton(path) -> ATA:
    data = _json(_read(path), path)
    if isinstance(data, dict) and "automaton" in data:
        data = data["automaton"]
    return ATA.from_json(data)


def read_word(path) -> TimedWord:
    return TimedWord.from_json(_json(_read(path), path))


def read_formula(path):
    return parse_formula(_read(path))


def _emit(args, payload, text=None):
    out = json.dumps(payload, indent=1) if args.json or text is None else text
    target = getattr(args, "output", None)
    if target:
        with open(target, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _alphabet(args, *parts):
    if getattr(args, "alphabet", None):
        return frozenset(args.alphabet.split(","))
    out = frozenset()
    for p in parts:
        out |= p
    return out or frozenset({"p"})


# commands -------------------------------------------------------------------


def cmd_eval(args):
    phi = read_formula(args.formula)
    word = read_word(args.word)
    if has_fixpoints(phi):
        E = to_equations(eliminate_unguarded(phi))
        sol = evaluate_fixpoint(E, word)
        table = sol.labels[E.names[0]]
    else:
        table = truth_table(phi, word)
    verdict = table[args.position - 1]
    payload = {"verdict": verdict}
    if args.table:
        payload["table"] = table
    text = "true" if verdict else "false"
    if args.table:
        text += "\n" + " ".join("1" if v else "0" for v in table)
    _emit(args, payload, text)


def cmd_accepts(args):
    A = read_automaton(args.automaton)
    verdict = accepts(A, read_word(args.word), cap=args.cap)
    _emit(args, {"verdict": verdict}, "true" if verdict else "false")


def cmd_compile(args):
    phi = read_formula(args.formula)
    alphabet = _alphabet(args, props_of(phi))
    A = (compile_frat if args.logic == "fratmtl" else compile_formula)(phi, alphabet)
    report = _report(A)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(A.dumps() + "\n")
        print(json.dumps(report))
    elif args.json:
        print(json.dumps({"automaton": A.to_json(), "report": report}, indent=1))
    else:
        print(A.dumps())
        print(json.dumps(report), file=sys.stderr)


def _report(A):
    r = classify(A)
    return {"locations": len(A.locations), **r}


def cmd_decompile(args):
    A = read_automaton(args.automaton)
    phi = decompile_frat(A) if args.target == "fratmtl" else decompile(A)
    _emit(args, {"formula": str(phi)}, str(phi))


def cmd_normalize(args):
    N = normalize(read_automaton(args.automaton))
    _emit(args, N.to_json(), N.dumps())


def cmd_classify(args):
    report = _report(read_automaton(args.automaton))
    print(json.dumps(report, indent=None if not args.json else 1))
    failed = [p for p in args.expect or [] if not _expectation(report, p)]
    if failed:
        raise PropertyViolation(f"expected {', '.join(failed)}")


def _expectation(report, prop):
    negate = prop.startswith("!") or prop.startswith("not-")
    key = prop.lstrip("!").removeprefix("not-")
    if key not in report or not isinstance(report[key], bool):
        raise InputError(f"unknown property {key!r}; use normal, lfr, cd or po")
    return report[key] != negate


def cmd_untime(args):
    P = untime(read_automaton(args.automaton), c_max=args.c_max)
    if args.dot:
        print(dfa_to_dot(afa_to_dfa(P)) if args.dfa else afa_to_dot(P))
        return
    payload = {"afa": P.to_json()}
    if args.dfa:
        payload["dfa"] = dfa_to_json(afa_to_dfa(P))
    print(json.dumps(payload, indent=1, default=sorted))


def cmd_synthesize(args):
    P = untime(read_automaton(args.automaton), c_max=args.c_max)
    phi = synthesize_ratmtl(afa_to_dfa(P), anchored=not args.strict)
    _emit(args, {"formula": str(phi)}, str(phi))


def cmd_fixpoint_eval(args):
    text = _read(args.system)
    E = load_system(text)
    word = read_word(args.word)
    sol = evaluate_fixpoint(E, word)
    payload = {"verdict": sol.verdict, "labels": sol.labels, "system": str(E)}
    width = max(len(z) for z in E.names)
    lines = [f"{'pos':<{width}}  " + " ".join(str(i + 1) for i in range(len(word)))]
    for z in E.names:
        lines.append(f"{z:<{width}}  " + " ".join("1" if v else "0" for v in sol.labels[z]))
    lines.append("true" if sol.verdict else "false")
    _emit(args, payload, "\n".join(lines))


def cmd_mso_eval(args):
    psi = parse_qformula(_read(args.formula))
    word = read_word(args.word)
    assignment = {}
    for item in args.assign or []:
        name, _, value = item.partition("=")
        if not value:
            raise InputError(f"bad assignment {item!r}; use x=3 or X=1,4")
        if name[:1].isupper():
            assignment[name] = {int(v) for v in value.split(",") if v}
        else:
            assignment[name] = int(value)
    for v in sorted(free_fo(psi) - set(assignment)):
        assignment[v] = 1
    for v in sorted(free_so(psi) - set(assignment)):
        raise InputError(f"free set variable {v} needs --assign {v}=...")
    verdict = eval_mso(psi, word, assignment)
    payload = {"verdict": verdict, "metric_depth": metric_depth(psi)}
    _emit(args, payload, "true" if verdict else "false")


def cmd_translate(args):
    phi = read_formula(args.formula)
    if args.target == "equations":
        E = to_equations(eliminate_unguarded(phi))
        _emit(args, {"system": str(E)}, str(E))
        return
    psi = (fratmtl_to_q2mso if args.target == "q2mso" else ratmtl_to_qkmso)(phi, args.anchor)
    text = format_qformula(psi)
    payload = {"formula": text, "metric_depth": metric_depth(psi), "first_order": is_first_order(psi)}
    _emit(args, payload, text)


def cmd_difftest(args):
    report = difftest(args.mode, seed=args.seed, count=args.count, words=args.words,
                      word_len=args.word_len, alphabet_size=args.alphabet_size,
                      max_md=args.max_md, jobs=args.jobs)
    if args.json:
        print(json.dumps(report.to_json(), indent=1))
    else:
        print(report.text())
    if report.disagreements:
        raise PropertyViolation(f"{len(report.disagreements)} disagreement(s)")


# parser ----------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="oneclock", description="One-clock alternating timed automata "
                                "and timed regular logics.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, fn, help_text):
        c = sub.add_parser(name, help=help_text)
        c.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                       help="machine-readable output")
        c.set_defaults(fn=fn)
        return c

    c = command("eval", cmd_eval, "evaluate a formula on a timed word")
    c.add_argument("formula")
    c.add_argument("word")
    c.add_argument("--position", type=int, default=1)
    c.add_argument("--table", action="store_true", help="print the truth value at every position")

    c = command("accepts", cmd_accepts, "run an automaton on a timed word")
    c.add_argument("automaton")
    c.add_argument("word")
    c.add_argument("--cap", type=int, default=100_000, help="configuration cap")

    c = command("compile", cmd_compile, "formula to automaton")
    c.add_argument("formula")
    c.add_argument("--logic", choices=["ratmtl", "fratmtl"], default="ratmtl")
    c.add_argument("--alphabet", help="comma-separated propositions (default: those in the formula)")
    c.add_argument("-o", "--output")

    c = command("decompile", cmd_decompile, "automaton to formula")
    c.add_argument("automaton")
    c.add_argument("--target", choices=["ratmtl", "fratmtl"], default="ratmtl")
    c.add_argument("-o", "--output")

    c = command("normalize", cmd_normalize, "normal form of an automaton")
    c.add_argument("automaton")
    c.add_argument("-o", "--output")

    c = command("classify", cmd_classify, "structural classification of an automaton")
    c.add_argument("automaton")
    c.add_argument("--expect", action="append", metavar="PROP",
                   help="fail with exit code 1 unless PROP holds (normal, lfr, cd, po; prefix ! to negate)")

    c = command("untime", cmd_untime, "region AFA (and DFA) of a reset-free automaton")
    c.add_argument("automaton")
    c.add_argument("--c-max", type=int, dest="c_max")
    c.add_argument("--dfa", action="store_true", help="also determinize")
    c.add_argument("--dot", action="store_true", help="emit a DOT rendering instead of JSON")

    c = command("synthesize", cmd_synthesize, "formula for a reset-free automaton")
    c.add_argument("automaton")
    c.add_argument("--c-max", type=int, dest="c_max")
    c.add_argument("--strict", action="store_true", help="read the positions after the anchor")
    c.add_argument("-o", "--output")

    c = command("fixpoint-eval", cmd_fixpoint_eval, "solve an equation system on a timed word")
    c.add_argument("system")
    c.add_argument("word")

    c = command("mso-eval", cmd_mso_eval, "model-check a QkMSO formula")
    c.add_argument("formula")
    c.add_argument("word")
    c.add_argument("--assign", action="append", metavar="VAR=VALUE",
                   help="x=3 for a position, X=1,4 for a set (free positions default to 1)")

    c = command("translate", cmd_translate, "formula to QkMSO or to an equation system")
    c.add_argument("formula")
    c.add_argument("--target", choices=["qkmso", "q2mso", "equations"], default="qkmso")
    c.add_argument("--anchor", default="t0")
    c.add_argument("-o", "--output")

    c = command("difftest", cmd_difftest, "differential testing against the oracles")
    c.add_argument("--mode", choices=MODES, default="compile")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=50)
    c.add_argument("--words", type=int, default=20, help="words per instance")
    c.add_argument("--word-len", type=int, default=6, dest="word_len")
    c.add_argument("--alphabet-size", type=int, default=2, dest="alphabet_size", choices=[1, 2, 3])
    c.add_argument("--max-md", type=int, default=2, dest="max_md")
    c.add_argument("--jobs", type=int, default=1)
    return p


def _fail(kind, message, code, exc=None):
    obj = {"error": kind, "message": message}
    if isinstance(exc, InputError) and exc.line is not None:
        obj["line"], obj["column"] = exc.line, exc.column
    print(json.dumps(obj), file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except PropertyViolation as exc:
        return _fail("PropertyViolation", str(exc), 1)
    except ResourceError as exc:
        return _fail(type(exc).__name__, str(exc), 3)
    except (InputError, PreconditionError) as exc:
        return _fail(type(exc).__name__, str(exc), 2, exc)
    except OneClockError as exc:
        return _fail(type(exc).__name__, str(exc), 2)
    except RecursionError:
        return _fail("ResourceError", "recursion depth exceeded", 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
