"""One-clock alternating timed automata, timed regular logics and their translations."""
from .ata import ATA, accepts, load_ata, make_ata
from .compiler import compile_formula, compile_frat
from .core import Interval, TimedWord, load_word, tw
from .decompiler import decompile, decompile_frat
from .errors import (InputError, NotConjunctiveDisjunctiveError, NotLoopFreeError, OneClockError,
                     PreconditionError, ResourceError, UnguardedError)
from .fixpoint import (compile_equations, evaluate_fixpoint, evaluate_sentence, load_system,
                       solve_ata_via_equations, to_equations)
from .logic import evaluate, parse_formula
from .qkmso import eval_mso, fratmtl_to_q2mso, parse_qformula, ratmtl_to_qkmso
from .structure import check_cd, check_lfr, check_po, classify, normalize
from .untiming import afa_to_dfa, synthesize_ratmtl, untime

__all__ = [
    "ATA", "accepts", "load_ata", "make_ata", "compile_formula", "compile_frat", "Interval",
    "TimedWord", "load_word", "tw", "decompile", "decompile_frat", "InputError",
    "NotConjunctiveDisjunctiveError", "NotLoopFreeError", "OneClockError", "PreconditionError",
    "ResourceError", "UnguardedError", "compile_equations", "evaluate_fixpoint", "evaluate_sentence",
    "load_system", "solve_ata_via_equations", "to_equations", "evaluate", "parse_formula", "eval_mso",
    "fratmtl_to_q2mso", "parse_qformula", "ratmtl_to_qkmso", "check_cd", "check_lfr", "check_po",
    "classify", "normalize", "afa_to_dfa", "synthesize_ratmtl", "untime",
]
