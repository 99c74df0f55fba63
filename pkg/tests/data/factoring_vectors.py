from fractions import Fraction

# (n, method, l1, l2, block widths, carry widths, qubits)
QUBIT_COUNTS = [
    (15, "direct", 2, 3, None, None, 4),
    (143, "table", 4, 4, (2, 2, 3), None, 12),
    (59989, "table", 8, 8, (3, 3, 3, 3, 3), None, 59),
    (376289, "table", 10, 10, (4, 3, 3, 3, 3, 2), (2, 3, 4, 3, 2), 94),
]

# (n, carries)
CARRY_COUNTS = [
    (143, 4),
    (59989, 11),
]

FACTORS = {
    15: (3, 5),
    143: (13, 11),
    59989: (251, 239),
    376289: (659, 571),
}

GROUND15 = (-1, 1, -1, 1)
ENERGY15_ALL_UP = 98
CHAIN_STRENGTH15 = 80
CHAIN_STRENGTH143 = 148

GROUND143 = [
    # p1 p2 q1 q2 c1 c2 c3 c4 t1 t2 t3 t4
    ((1, -1, -1, 1), (13, 11)),
    ((-1, 1, 1, -1), (11, 13)),
]
CARRIES143 = (0, 0, 1, 0)
TARGETS143 = [3, 1, 4]
OFFSET143 = 808

# printed 0-based fields of the 143 model
H143 = [
    Fraction(261, 2),
    Fraction(215, 2),
    Fraction(261, 2),
    Fraction(215, 2),
    -41,
    -82,
    3,
    6,
    -137,
    -81,
    -107,
    -81,
]

# a sample of printed 143 couplings, 1-based
J143_SAMPLE = {
    (1, 3): 79,
    (1, 9): -148,
    (2, 4): 71,
    (2, 11): -124,
    (5, 6): 34,
    (7, 8): 34,
    (9, 11): 1,
}

RSA768_BITS = 768
RSA768_QUBITS = 147456
