from __future__ import annotations

from fractions import Fraction

import pytest

from subshiftdim import ContractionSystem, InputError
from subshiftdim.errors import (
    ContractViolation,
    ConvergenceError,
    EmptyLanguageError,
    NotApplicableError,
    PresentationError,
    ResourceLimitError,
)


def test_accessors():
    cs = ContractionSystem((0.2, 0.4), (0.3, 0.5))
    assert cs.size == 2
    assert (cs.c_min, cs.c_max, cs.cbar_min, cs.cbar_max) == (0.2, 0.4, 0.3, 0.5)
    assert cs.constant(2, "upper") == 0.5
    assert cs.max_constant("upper") == 0.5


@pytest.mark.parametrize("lower, upper", [((0.0,), (0.5,)), ((0.6,), (0.5,)), ((0.5,), (1.0,)),
                                          ((0.5, 0.5), (0.5,)), ((), ())])
def test_invalid(lower, upper):
    with pytest.raises(InputError):
        ContractionSystem(lower, upper)


def test_exact_weights():
    cs = ContractionSystem.similarities((Fraction(1, 3), Fraction(1, 2)))
    assert cs.word_weight((1, 2, 2)) == Fraction(1, 12)
    assert cs.word_weight((1, 2), 2) == Fraction(1, 36)
    assert cs.word_weight(()) == 1


def test_bad_side_and_letter():
    cs = ContractionSystem.uniform(2, 0.5)
    with pytest.raises(InputError):
        cs.constants("middle")
    with pytest.raises(InputError):
        cs.constant(3)


def test_exit_codes():
    assert InputError("x").exit_code == 2
    assert ContractViolation("x").exit_code == 2 and PresentationError("x").exit_code == 2
    assert NotApplicableError("x").exit_code == 2
    assert EmptyLanguageError("x").exit_code == 3
    assert ConvergenceError("x", best=1.5).exit_code == 4
    assert ConvergenceError("x", best=1.5).best == 1.5
    assert ResourceLimitError("x").exit_code == 5
