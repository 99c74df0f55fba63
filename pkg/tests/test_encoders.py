import logging

import numpy as np
import pytest
from data.factoring_vectors import (
    CARRIES143,
    CARRY_COUNTS,
    FACTORS,
    QUBIT_COUNTS,
    RSA768_BITS,
    RSA768_QUBITS,
    TARGETS143,
)

from qfactor.encoders import (
    PRESETS,
    assignment_for,
    asymptotic_qubits,
    block_equation,
    block_system_json,
    build_block_system,
    coefficient_range,
    encode,
    encode_direct,
    encode_table,
    estimate_qubits,
    length_candidates,
)
from qfactor.golden import EQUATIONS143, F15
from qfactor.pbp import CARRY, evaluate, values
from qfactor.quadratize import quadratize
from qfactor.solve import decode, index_spins
from qfactor.util import LOGGER_NAME, EvenInput, LengthTooSmall, WidthMismatch

logger = logging.getLogger(LOGGER_NAME)


def system(n):
    layout = PRESETS[n]
    return build_block_system(
        n, layout["l1"], layout["l2"], layout["widths"], layout.get("carry_bits")
    )


class TestDirect:
    def test_15(self):
        cf = encode_direct(15, 2, 3)
        assert cf.polynomial == F15
        assert len(cf.registry) == 3

    def test_even(self):
        with pytest.raises(EvenInput):
            encode_direct(16, 2, 3)

    @pytest.mark.parametrize("l1, l2", [(2, 2), (3, 3)], ids=["2x2", "3x3"])
    def test_too_short(self, l1, l2):
        with pytest.raises(LengthTooSmall):
            encode_direct(143, l1, l2)

    def test_too_small(self):
        with pytest.raises(ValueError):
            encode_direct(7, 2, 2)

    def test_fixed_leading(self):
        cf = encode_direct(143, 4, 4, fixed_leading=True)
        # two free middle bits per factor
        assert len(cf.registry) == 4
        assert evaluate(cf.polynomial, assignment_for(cf, 13, 11)) == 0

    def test_count_bound(self):
        assert estimate_qubits(35, "direct", 3, 3) == 6
        assert estimate_qubits(35, "direct", 3, 3) <= (3 + 2) * (3 - 1)


class TestTable:
    def test_143_targets(self):
        bs = system(143)
        assert bs.targets == TARGETS143
        assert bs.widths == [2, 2, 3]
        assert len(bs.carries) == 4

    def test_143_equations(self):
        bs = system(143)
        assert tuple(block_equation(bs, b) for b in range(3)) == EQUATIONS143

    @pytest.mark.parametrize(
        "n, carries", CARRY_COUNTS, ids=[str(n) for n, _ in CARRY_COUNTS]
    )
    def test_carry_counts(self, n, carries):
        assert len(system(n).carries) == carries

    def test_carry_override(self):
        bs = system(376289)
        assert [len(b.carries) for b in bs.blocks] == [2, 3, 4, 3, 2, 0]

    def test_default_widths(self):
        bs = build_block_system(143, 4, 4)
        assert bs.widths == [3, 3, 1]

    def test_width_shortfall(self):
        with pytest.raises(WidthMismatch):
            build_block_system(143, 4, 4, (2, 2))

    def test_carry_width_count(self):
        with pytest.raises(WidthMismatch):
            build_block_system(143, 4, 4, (2, 2, 3), carry_bits=(1,))

    def test_lengths(self):
        with pytest.raises(LengthTooSmall):
            build_block_system(143, 3, 3)

    def test_json(self):
        doc = block_system_json(system(143))
        assert doc["carry_count"] == 4
        assert [b["target"] for b in doc["blocks"]] == TARGETS143
        assert doc["blocks"][0]["carries"] == ["c1", "c2"]


class TestAssignment:
    @pytest.mark.parametrize(
        "n", sorted(FACTORS), ids=[str(n) for n in sorted(FACTORS)]
    )
    def test_zero_at_factors(self, n):
        p, q = FACTORS[n]
        if n in PRESETS:
            cf = encode_table(system(n))
        else:
            cf = encode_direct(n, p.bit_length(), q.bit_length())
        assert evaluate(cf.polynomial, assignment_for(cf, p, q)) == 0

    def test_143_carries(self):
        cf = encode_table(system(143))
        bits = assignment_for(cf, 13, 11)
        assert tuple(bits[c] for c in cf.registry.ids(CARRY)) == CARRIES143

    def test_ancillas_follow_products(self):
        reduced, _ = quadratize(encode_table(system(143)))
        bits = assignment_for(reduced, 11, 13)
        assert evaluate(reduced.polynomial, bits) == 0

    @pytest.mark.parametrize(
        "p, q", [(12, 11), (15, 11), (3, 11)], ids=["even", "wrong", "short"]
    )
    def test_rejects(self, p, q):
        with pytest.raises(ValueError):
            assignment_for(encode_table(system(143)), p, q)


class TestEstimate:
    @pytest.mark.parametrize(
        "n, method, l1, l2, widths, carry_bits, qubits",
        QUBIT_COUNTS,
        ids=[str(v[0]) for v in QUBIT_COUNTS],
    )
    def test_counts(self, n, method, l1, l2, widths, carry_bits, qubits):
        assert (
            estimate_qubits(n, method, l1, l2, widths, carry_bits=carry_bits) == qubits
        )

    @pytest.mark.parametrize(
        "n, method, l1, l2, widths, carry_bits, qubits",
        QUBIT_COUNTS[:3],
        ids=[str(v[0]) for v in QUBIT_COUNTS[:3]],
    )
    def test_matches_reduction(self, n, method, l1, l2, widths, carry_bits, qubits):
        cf = encode(n, method, l1, l2, widths, carry_bits=carry_bits)
        assert len(quadratize(cf)[0].registry) == qubits

    def test_asymptotic(self):
        assert asymptotic_qubits((1 << (RSA768_BITS - 1)) + 1) == RSA768_QUBITS
        assert asymptotic_qubits(143) == 16

    def test_length_candidates(self):
        candidates = length_candidates(143)
        assert candidates[0] == (4, 4)
        assert all(a >= b >= 2 for a, b in candidates)
        assert {a + b for a, b in candidates} == {8, 9}


@pytest.mark.slow
def test_coefficient_range():
    study = coefficient_range(samples=50, seed=0)
    assert len(study.points) == 50
    assert study.fitted_c > 0
    # the cubic law bounds every sample within a factor of two
    assert study.worst_ratio <= 2


def odd_semiprimes(limit):
    out = []
    for n in range(9, limit + 1, 2):
        q = next(d for d in range(3, n + 1, 2) if n % d == 0)
        p = n // q
        if p > 1 and all(p % d for d in range(3, int(p**0.5) + 1, 2)):
            out.append((n, p, q))
    return out


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, p, q", odd_semiprimes(4095), ids=[str(v[0]) for v in odd_semiprimes(4095)]
)
def test_zeros_are_factorizations(n, p, q):
    cf = encode_table(build_block_system(n, p.bit_length(), q.bit_length()))
    ids = [v.id for v in cf.registry]
    twice = values(cf.polynomial, ids)
    assert twice.min() == 0
    zeros = index_spins(np.flatnonzero(twice == 0), len(ids))
    readings = [decode(row, cf.registry, cf) for row in zeros.tolist()]
    assert all(r.valid for r in readings)
    assert (p, q) in {(r.p, r.q) for r in readings}
