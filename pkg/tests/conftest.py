from __future__ import annotations

import math
from pathlib import Path

import pytest

from subshiftdim import Alphabet, ContractionSystem, normalize_forbidden_set
from subshiftdim.sofic import even_shift_graph

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"
PHI = (1 + math.sqrt(5)) / 2

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str = ""):
        ACCEPTANCE[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")


@pytest.fixture
def ab2():
    return Alphabet(2)


@pytest.fixture
def golden(ab2):
    """F = {22}."""
    return normalize_forbidden_set([(2, 2)], ab2)


@pytest.fixture
def four_by_four(ab2):
    """F = {112, 211, 222}: the reducible 4x4 example."""
    return normalize_forbidden_set([(1, 1, 2), (2, 1, 1), (2, 2, 2)], ab2)


@pytest.fixture
def even_shift():
    return even_shift_graph()


@pytest.fixture
def third():
    return ContractionSystem.uniform(2, 1 / 3)


@pytest.fixture
def half():
    return ContractionSystem.uniform(2, 0.5)


@pytest.fixture
def systems_dir():
    return SYSTEMS
