import random
from pathlib import Path

import pytest
from hypothesis import settings

from oneclock.ata import load_ata
from oneclock.core import load_word
from oneclock.logic import parse_formula

# fixed example streams keep property tests reproducible and their run time stable
settings.register_profile("pinned", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("pinned")

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# acceptance criterion lines, filled in by test_acceptance.py
ACCEPTANCE = {}


def corpus_path(name):
    return CORPUS / name


def corpus_ata(name):
    return load_ata(CORPUS / f"{name}.ata")


def corpus_word(name):
    return load_word(CORPUS / f"{name}.word")


def corpus_formula(name):
    return parse_formula((CORPUS / f"{name}.ratmtl").read_text())


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
