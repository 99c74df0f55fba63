"""Reference coefficient tables of the worked 15 and 143 instances"""

import logging
from fractions import Fraction
from typing import List, Tuple

from .encoders import (
    PRESETS,
    block_equation,
    build_block_system,
    encode_direct,
    encode_table,
)
from .ising import IsingModel, to_ising
from .pbp import PseudoBooleanPolynomial
from .quadratize import quadratize
from .util import LOGGER_NAME

logger = logging.getLogger(LOGGER_NAME)

F15 = PseudoBooleanPolynomial(
    {
        (1, 2, 3): 128,
        (1, 2): -56,
        (1, 3): -48,
        (2, 3): 16,
        (1,): -52,
        (2,): -52,
        (3,): -96,
        (): 196,
    }
)

F15_QUADRATIC = PseudoBooleanPolynomial(
    {
        (1, 2): 200,
        (1, 3): -48,
        (1, 4): -512,
        (2, 3): 16,
        (2, 4): -512,
        (3, 4): 128,
        (1,): -52,
        (2,): -52,
        (3,): -96,
        (4,): 768,
        (): 196,
    }
)

ISING15 = IsingModel(
    4,
    (58, 50, 12, -80),
    {(0, 1): 25, (0, 2): -6, (0, 3): -64, (1, 2): 2, (1, 3): -64, (2, 3): 16},
    149,
)

# ids: p1 p2 q1 q2 = 1..4, c1..c4 = 5..8, t1..t4 = 9..12
P1, P2, Q1, Q2, C1, C2, C3, C4, T1, T2, T3, T4 = range(1, 13)

# left sides of the three block equations
EQUATIONS143 = (
    PseudoBooleanPolynomial(
        {
            (P1,): 1,
            (Q1,): 1,
            (P2,): 2,
            (Q2,): 2,
            (P1, Q1): 2,
            (C1,): -4,
            (C2,): -8,
            (): -3,
        }
    ),
    PseudoBooleanPolynomial(
        {
            (P1,): 2,
            (Q1,): 2,
            (P2, Q1): 1,
            (P1, Q2): 1,
            (P2, Q2): 2,
            (C1,): 1,
            (C2,): 2,
            (C3,): -4,
            (C4,): -8,
            (): 1,
        }
    ),
    PseudoBooleanPolynomial({(P2,): 1, (Q2,): 1, (C3,): 1, (C4,): 2, (): -2}),
)

F143_QUADRATIC = PseudoBooleanPolynomial(
    {
        (C1,): 43,
        (C2,): 120,
        (C3,): 5,
        (C4,): 44,
        (P1,): 3,
        (P2,): -11,
        (Q1,): 3,
        (Q2,): -11,
        (T1,): 444,
        (T2,): 252,
        (T3,): 372,
        (T4,): 252,
        (C1, C2): 68,
        (C1, C3): -8,
        (C1, C4): -16,
        (C2, C3): -16,
        (C2, C4): -32,
        (C3, C4): 68,
        (C1, P1): -4,
        (C1, P2): -16,
        (C2, P1): -8,
        (C2, P2): -32,
        (C3, P1): -16,
        (C3, P2): 2,
        (C4, P1): -32,
        (C4, P2): 4,
        (C1, Q1): -4,
        (C1, Q2): -16,
        (C2, Q1): -8,
        (C2, Q2): -32,
        (C3, Q1): -16,
        (C3, Q2): 2,
        (C4, Q1): -32,
        (C4, Q2): 4,
        (C1, T1): -16,
        (C1, T2): 2,
        (C2, T1): -32,
        (C1, T3): 4,
        (C2, T2): 4,
        (C1, T4): 2,
        (C2, T3): 8,
        (C3, T2): -8,
        (C2, T4): 4,
        (C3, T3): -16,
        (C4, T2): -16,
        (C3, T4): -8,
        (C4, T3): -32,
        (C4, T4): -16,
        (P1, P2): 4,
        (P1, Q1): 158,
        (P1, Q2): 95,
        (P2, Q1): 95,
        (P2, Q2): 142,
        (Q1, Q2): 4,
        (P1, T1): -296,
        (P1, T2): -168,
        (P2, T1): 12,
        (P2, T2): 12,
        (P2, T3): -248,
        (P2, T4): -168,
        (Q1, T1): -296,
        (Q2, T1): 12,
        (Q2, T2): -168,
        (Q1, T4): -168,
        (Q2, T3): -248,
        (Q2, T4): 12,
        (T1, T3): 2,
        (): 14,
    }
)

H143 = tuple(
    Fraction(v)
    for v in ("261/2", "215/2", "261/2", "215/2", -41, -82, 3, 6, -137, -81, -107, -81)
)

# printed matrix, 1-based, upper triangle; zero entries omitted
J143_ONE_BASED = {
    (1, 2): 2, (1, 3): 79, (1, 4): Fraction(95, 2), (1, 5): -2, (1, 6): -4,
    (1, 7): -8, (1, 8): -16, (1, 9): -148, (1, 10): -84,
    (2, 3): Fraction(95, 2), (2, 4): 71, (2, 5): -8, (2, 6): -16, (2, 7): 1,
    (2, 8): 2, (2, 9): 6, (2, 10): 6, (2, 11): -124, (2, 12): -84,
    (3, 4): 2, (3, 5): -2, (3, 6): -4, (3, 7): -8, (3, 8): -16, (3, 9): -148,
    (3, 12): -84,
    (4, 5): -8, (4, 6): -16, (4, 7): 1, (4, 8): 2, (4, 9): 6, (4, 10): -84,
    (4, 11): -124, (4, 12): 6,
    (5, 6): 34, (5, 7): -4, (5, 8): -8, (5, 9): -8, (5, 10): 1, (5, 11): 2,
    (5, 12): 1,
    (6, 7): -8, (6, 8): -16, (6, 9): -16, (6, 10): 2, (6, 11): 4, (6, 12): 2,
    (7, 8): 34, (7, 10): -4, (7, 11): -8, (7, 12): -4,
    (8, 10): -8, (8, 11): -16, (8, 12): -8,
    (9, 11): 1,
}  # fmt: skip

# the substituted constant; the differing printed value is not reproduced
OFFSET143 = 808

ISING143 = IsingModel(
    12, H143, {(i - 1, j - 1): v for (i, j), v in J143_ONE_BASED.items()}, OFFSET143
)


def model15() -> Tuple:
    cf = encode_direct(15, 2, 3)
    reduced, ledger = quadratize(cf)
    return cf, reduced, ledger, to_ising(reduced)


def model143() -> Tuple:
    layout = PRESETS[143]
    bs = build_block_system(143, layout["l1"], layout["l2"], layout["widths"])
    cf = encode_table(bs)
    reduced, ledger = quadratize(cf)
    return bs, cf, reduced, ledger, to_ising(reduced)


def check_golden() -> List[Tuple[str, bool]]:
    """(name, passed) for every reference table"""
    cf, reduced, _, model = model15()
    bs, cf143, reduced143, _, model143_ = model143()
    results = [
        ("15 cost polynomial", cf.polynomial == F15),
        ("15 quadratic polynomial", reduced.polynomial == F15_QUADRATIC),
        ("15 ising model", model == ISING15),
        ("143 block targets", bs.targets == [3, 1, 4]),
        (
            "143 block equations",
            tuple(block_equation(bs, b) for b in range(3)) == EQUATIONS143,
        ),
        ("143 quadratic polynomial", reduced143.polynomial == F143_QUADRATIC),
        ("143 fields", model143_.h == H143),
        ("143 couplings", dict(model143_.J) == dict(ISING143.J)),
    ]
    for name, passed in results:
        logger.debug(f"golden {name}: {'pass' if passed else 'FAIL'}")
    return results
