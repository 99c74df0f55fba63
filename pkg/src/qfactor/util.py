"""constants, errors and small exact-arithmetic helpers"""

import logging
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

__app_name__ = "qfactor"
__version__ = "1.0.0"

LOGGER_NAME = __app_name__

Number = Union[int, Fraction]

logger = logging.getLogger(LOGGER_NAME)


class EvenInput(ValueError):
    pass


class LengthTooSmall(ValueError):
    pass


class WidthMismatch(ValueError):
    pass


class MissingVariable(ValueError):
    pass


class DegreeTooHigh(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class TooLarge(ValueError):
    pass


class NoEmbeddingFound(ValueError):
    pass


class InvalidEmbedding(ValueError):
    pass


class ReductionBroken(RuntimeError):
    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class NonUnitaryDrift(RuntimeError):
    pass


def check_odd(n: int):
    if n % 2 == 0:
        raise EvenInput(f"{n} is even; factors with a trailing 1 bit cannot express 2")


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def common_denominator(values: Iterable[Number], base: int = 1) -> int:
    return lcm(base, *(Fraction(v).denominator for v in values))


def format_exact(value: Number) -> str:
    """exact decimal rendering when the denominator is a power of two"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    if den & (den - 1) == 0:
        places = den.bit_length() - 1
        scaled = abs(value.numerator) * 10**places // den
        sign = "-" if value < 0 else ""
        digits = str(scaled).rjust(places + 1, "0")
        return f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0")
    return str(float(value))


def parse_exact(text: str) -> Fraction:
    return Fraction(text.strip())


# encoding methods
DIRECT = "direct"
TABLE = "table"
METHODS = (DIRECT, TABLE)
