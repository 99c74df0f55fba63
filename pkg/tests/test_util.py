import logging
from fractions import Fraction

import pytest

from qfactor.util import (
    LOGGER_NAME,
    EvenInput,
    ReductionBroken,
    check_odd,
    common_denominator,
    format_exact,
    parse_exact,
)

logger = logging.getLogger(LOGGER_NAME)


@pytest.mark.parametrize("n", [2, 16, 143 * 2], ids=["two", "sixteen", "even-286"])
def test_check_odd(n):
    with pytest.raises(EvenInput):
        check_odd(n)


def test_common_denominator():
    assert common_denominator([Fraction(1, 2), 3]) == 2
    assert common_denominator([1, 3], base=2) == 2
    assert common_denominator([Fraction(1, 4), Fraction(1, 6)]) == 12


@pytest.mark.parametrize(
    "value, text",
    [
        (Fraction(261, 2), "130.5"),
        (Fraction(-5, 4), "-1.25"),
        (Fraction(1, 4), "0.25"),
        (808, "808"),
        (Fraction(1, 3), str(1 / 3)),
    ],
    ids=["half", "negative-quarter", "quarter", "integer", "third"],
)
def test_format_exact(value, text):
    assert format_exact(value) == text


def test_parse_exact():
    assert parse_exact("130.5") == Fraction(261, 2)
    assert parse_exact(" -1.25 ") == Fraction(-5, 4)
    assert parse_exact("95/2") == Fraction(95, 2)


def test_counterexample():
    error = ReductionBroken("broken", counterexample={1: 0})
    assert error.counterexample == {1: 0}
    assert isinstance(error, RuntimeError)
