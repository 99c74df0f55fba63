"""Factorization cost functions: direct (n − pq)² and the block multiplication table"""

import logging
from collections import namedtuple
from itertools import combinations
from statistics import median
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .pbp import (
    ANCILLA,
    GENERIC,
    P,
    Q,
    Key,
    PseudoBooleanPolynomial,
    Variable,
    VariableRegistry,
    multiply,
    stats,
)
from .quadratize import greedy_reduce, quadratize
from .util import (
    DIRECT,
    LOGGER_NAME,
    TABLE,
    LengthTooSmall,
    WidthMismatch,
    check_odd,
)

logger = logging.getLogger(LOGGER_NAME)

DEFAULT_BLOCK_WIDTH = 3

# block layouts of the worked instances
PRESETS = {
    143: {"l1": 4, "l2": 4, "widths": (2, 2, 3)},
    59989: {"l1": 8, "l2": 8, "widths": (3, 3, 3, 3, 3)},
    376289: {
        "l1": 10,
        "l2": 10,
        "widths": (4, 3, 3, 3, 3, 2),
        "carry_bits": (2, 3, 4, 3, 2),
    },
}

CostFunction = namedtuple(
    "CostFunction",
    ["polynomial", "registry", "method", "n", "l1", "l2", "fixed_leading", "blocks"],
)

Block = namedtuple("Block", ["start", "width", "target", "carries"])


class BlockSystem(
    namedtuple("BlockSystem", ["n", "l1", "l2", "columns", "blocks", "registry"])
):
    """
    columns[k] lists the monomials (tuples of variable ids, () for a fixed 1)
    summed in the 2^k column; carry bit b of a block with width w starting at
    column s is a monomial of column s + w + b.
    """

    @property
    def carries(self) -> List[int]:
        return [c for block in self.blocks for c in block.carries]

    @property
    def targets(self) -> List[int]:
        return [block.target for block in self.blocks]

    @property
    def widths(self) -> List[int]:
        return [block.width for block in self.blocks]


def unknown_positions(length: int, fixed_leading: bool) -> List[int]:
    return list(range(1, length - 1 if fixed_leading else length))


def factor_polynomial(
    registry: VariableRegistry, role: str, length: int, fixed_leading: bool
) -> PseudoBooleanPolynomial:
    constant = 1 + (1 << (length - 1) if fixed_leading else 0)
    terms = {(): constant}
    for vid in registry.ids(role):
        terms[(vid,)] = 1 << registry[vid].index
    return PseudoBooleanPolynomial(terms)


def _check_lengths(n: int, l1: int, l2: int):
    check_odd(n)
    if l1 < 2 or l2 < 2:
        raise LengthTooSmall(f"Factor lengths must be at least 2, got {l1}, {l2}")


def encode_direct(
    n: int, l1: int, l2: int, fixed_leading: bool = False
) -> CostFunction:
    _check_lengths(n, l1, l2)
    if n < 9:
        raise ValueError(f"{n} is too small to have two odd factors above 1")
    if ((1 << l1) - 1) * ((1 << l2) - 1) < n:
        raise LengthTooSmall(f"{l1}- and {l2}-bit factors cannot reach {n}")
    registry = VariableRegistry.for_factors(
        unknown_positions(l1, fixed_leading), unknown_positions(l2, fixed_leading)
    )
    p = factor_polynomial(registry, P, l1, fixed_leading)
    q = factor_polynomial(registry, Q, l2, fixed_leading)
    residual = n - multiply(p, q)
    polynomial = multiply(residual, residual)
    logger.debug(
        f"direct cost for {n}: {len(registry)} variables, {len(polynomial)} terms"
    )
    return CostFunction(polynomial, registry, DIRECT, n, l1, l2, fixed_leading, None)


def from_polynomial(polynomial: PseudoBooleanPolynomial) -> CostFunction:
    """wrap a bare polynomial over ids 1..k for the generic reduction path"""
    size = max(polynomial.variables, default=0)
    registry = VariableRegistry(
        Variable(i, GENERIC, i, None, None, f"x{i}") for i in range(1, size + 1)
    )
    return CostFunction(polynomial, registry, None, None, None, None, False, None)


def block_layout(top: int, widths: Optional[Sequence[int]]) -> List[Tuple[int, int]]:
    """(start, width) per block over columns 1..top; the last block may be cut short"""
    if widths is None:
        widths = [DEFAULT_BLOCK_WIDTH] * -(-top // DEFAULT_BLOCK_WIDTH)
    if any(w < 1 for w in widths):
        raise WidthMismatch(f"Block widths must be positive: {list(widths)}")
    if sum(widths) < top:
        raise WidthMismatch(
            f"Widths {list(widths)} cover {sum(widths)} of {top} columns"
        )
    layout = []
    start = 1
    for w in widths:
        if start > top:
            raise WidthMismatch(
                f"Block at column {start} lies above the table top {top}"
            )
        layout.append((start, min(w, top - start + 1)))
        start += w
    return layout


def build_block_system(
    n: int,
    l1: int,
    l2: int,
    block_widths: Optional[Sequence[int]] = None,
    carry_bits: Optional[Sequence[int]] = None,
) -> BlockSystem:
    _check_lengths(n, l1, l2)
    if not l1 + l2 - 1 <= n.bit_length() <= l1 + l2:
        raise LengthTooSmall(f"{l1}- and {l2}-bit factors cannot multiply to {n}")
    top = n.bit_length() - 1
    layout = block_layout(top, block_widths)
    if carry_bits is not None and len(carry_bits) != len(layout) - 1:
        raise WidthMismatch(
            f"{len(carry_bits)} carry widths for {len(layout)} blocks"
        )

    p_ids = {i: i for i in unknown_positions(l1, True)}
    q_ids = {j: len(p_ids) + j for j in unknown_positions(l2, True)}
    columns: List[List[Key]] = [[] for _ in range(top + 1)]
    for i in range(l1):
        for j in range(l2):
            columns[i + j].append(
                tuple(v for v in (p_ids.get(i), q_ids.get(j)) if v is not None)
            )

    next_id = len(p_ids) + len(q_ids) + 1
    blocks = []
    for b, (start, width) in enumerate(layout):
        target = (n >> start) & ((1 << width) - 1)
        carries = []
        if b < len(layout) - 1:
            if carry_bits is None:
                peak = sum(
                    len(columns[k]) << (k - start) for k in range(start, start + width)
                )
                count = (peak >> width).bit_length()
            else:
                count = carry_bits[b]
            count = min(count, top - (start + width) + 1)
            for bit in range(count):
                columns[start + width + bit].append((next_id,))
                carries.append(next_id)
                next_id += 1
        blocks.append(Block(start, width, target, tuple(carries)))

    registry = VariableRegistry.for_factors(
        list(p_ids), list(q_ids), carries=next_id - len(p_ids) - len(q_ids) - 1
    )
    bs = BlockSystem(
        n, l1, l2, tuple(tuple(c) for c in columns), tuple(blocks), registry
    )
    logger.debug(
        f"block system for {n}: widths {bs.widths}, {len(bs.carries)} carries,"
        f" targets {bs.targets}"
    )
    return bs


def block_equation(bs: BlockSystem, b: int) -> PseudoBooleanPolynomial:
    """left side of block b's equation, zero exactly when the block balances"""
    block = bs.blocks[b]
    terms: Dict[Key, int] = {(): -block.target}
    for k in range(block.start, block.start + block.width):
        for monomial in bs.columns[k]:
            terms[monomial] = terms.get(monomial, 0) + (1 << (k - block.start))
    for bit, carry in enumerate(block.carries):
        terms[(carry,)] = terms.get((carry,), 0) - (1 << (block.width + bit))
    return PseudoBooleanPolynomial(terms)


def encode_table(bs: BlockSystem) -> CostFunction:
    polynomial = PseudoBooleanPolynomial()
    for b in range(len(bs.blocks)):
        equation = block_equation(bs, b)
        polynomial = polynomial + multiply(equation, equation)
    return CostFunction(polynomial, bs.registry, TABLE, bs.n, bs.l1, bs.l2, True, bs)


def encode(
    n: int,
    method: str,
    l1: int,
    l2: int,
    block_widths: Optional[Sequence[int]] = None,
    fixed_leading: bool = False,
    carry_bits: Optional[Sequence[int]] = None,
) -> CostFunction:
    if method == DIRECT:
        return encode_direct(n, l1, l2, fixed_leading)
    return encode_table(build_block_system(n, l1, l2, block_widths, carry_bits))


def preset(n: int) -> Dict:
    return dict(PRESETS.get(n, {}))


def _factor_bits(registry, role, value, length, fixed_leading, name):
    if value % 2 == 0 or value.bit_length() > length:
        raise ValueError(f"{name}={value} does not fit an odd {length}-bit factor")
    if fixed_leading and value.bit_length() != length:
        raise ValueError(f"{name}={value} lacks the fixed leading bit of {length} bits")
    return {vid: (value >> registry[vid].index) & 1 for vid in registry.ids(role)}


def assignment_for(cf: CostFunction, p: int, q: int) -> Dict[int, int]:
    """bits of a known factorization, with derived carries and ancillas"""
    registry = cf.registry
    bits = _factor_bits(registry, P, p, cf.l1, cf.fixed_leading, "p")
    bits.update(_factor_bits(registry, Q, q, cf.l2, cf.fixed_leading, "q"))
    if cf.method == TABLE:
        bs = cf.blocks
        for b, block in enumerate(bs.blocks):
            total = -block.target
            for k in range(block.start, block.start + block.width):
                for monomial in bs.columns[k]:
                    if all(bits[v] for v in monomial):
                        total += 1 << (k - block.start)
            carry, rest = divmod(total, 1 << block.width)
            if rest or carry < 0 or carry >> len(block.carries):
                raise ValueError(f"{p}*{q} does not balance block {b + 1} of {cf.n}")
            for bit, cid in enumerate(block.carries):
                bits[cid] = (carry >> bit) & 1
    for vid in registry.ids(ANCILLA):
        a, b = registry[vid].pair
        bits[vid] = bits[a] & bits[b]
    return bits


def block_system_json(bs: BlockSystem) -> dict:
    label = bs.registry.label
    return {
        "n": bs.n,
        "l1": bs.l1,
        "l2": bs.l2,
        "columns": [
            {
                "power": k,
                "entries": ["*".join(label(v) for v in m) or "1" for m in column],
            }
            for k, column in enumerate(bs.columns)
        ],
        "blocks": [
            {
                "columns": [block.start, block.start + block.width - 1],
                "width": block.width,
                "target": block.target,
                "carries": [label(c) for c in block.carries],
                "carry_weights": [
                    1 << (block.width + b) for b in range(len(block.carries))
                ],
            }
            for block in bs.blocks
        ],
        "carry_count": len(bs.carries),
    }


def _direct_support(p_ids: List[int], q_ids: List[int]) -> List[Key]:
    """higher-order monomials of (n − pq)², none of which cancel"""
    support = []
    for a in range(3):
        for b in range(3):
            if a + b < 3:
                continue
            for ps in combinations(p_ids, a):
                for qs in combinations(q_ids, b):
                    support.append(tuple(sorted(ps + qs)))
    return support


def estimate_qubits(
    n: int,
    method: str,
    l1: int,
    l2: int,
    block_widths: Optional[Sequence[int]] = None,
    fixed_leading: bool = False,
    carry_bits: Optional[Sequence[int]] = None,
) -> int:
    if method == DIRECT:
        _check_lengths(n, l1, l2)
        p_ids = list(range(1, len(unknown_positions(l1, fixed_leading)) + 1))
        q_ids = [
            len(p_ids) + j
            for j in range(1, len(unknown_positions(l2, fixed_leading)) + 1)
        ]
        bits = len(p_ids) + len(q_ids)
        support = {key: 1 for key in _direct_support(p_ids, q_ids)}
        _, made = greedy_reduce(support, bits + 1)
        return bits + len(made)

    bs = build_block_system(n, l1, l2, block_widths, carry_bits)
    carry_ids = set(bs.carries)
    landing = {
        k for k, column in enumerate(bs.columns) for m in column if set(m) & carry_ids
    }
    if all(
        block.carries or landing & set(range(block.start, block.start + block.width))
        for block in bs.blocks
    ):
        # every unknown product then meets a carry in its block square
        return len(bs.registry) + len(bs.registry.ids(P)) * len(bs.registry.ids(Q))
    return len(quadratize(encode_table(bs))[0].registry)


def asymptotic_qubits(n: int) -> int:
    """the log²(n)/4 estimate of the block method at scale"""
    return n.bit_length() ** 2 // 4


def length_candidates(n: int) -> List[Tuple[int, int]]:
    """(l1, l2) pairs with l1 ≥ l2 ≥ 2, shorter totals and balanced pairs first"""
    bits = n.bit_length()
    out = []
    for total in (bits, bits + 1):
        for l2 in range(total // 2, 1, -1):
            out.append((total - l2, l2))
    return out


RangePoint = namedtuple("RangePoint", ["n", "p", "q", "log2n", "max_coeff"])
RangeStudy = namedtuple("RangeStudy", ["points", "fitted_c", "worst_ratio"])


def _is_prime(value: int) -> bool:
    if value < 2:
        return False
    return all(value % d for d in range(2, int(value**0.5) + 1))


def _random_prime(rng: np.random.Generator, bits: int) -> int:
    while True:
        candidate = int(rng.integers(1 << (bits - 1), 1 << bits)) | 1
        if _is_prime(candidate):
            return candidate


def coefficient_range(
    samples: int = 50, seed: int = 0, min_bits: int = 9, max_bits: int = 12
) -> RangeStudy:
    """
    Largest coefficient of the quadratized block cost over random balanced
    semiprimes, fitted as C·(log₂ n)³ with C the median ratio.
    """
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < samples:
        bits = int(rng.integers(min_bits, max_bits + 1))
        p, q = _random_prime(rng, bits), _random_prime(rng, bits)
        n = p * q
        cf = encode_table(build_block_system(n, bits, bits))
        reduced, _ = quadratize(cf)
        points.append(
            RangePoint(n, p, q, np.log2(n), stats(reduced.polynomial).max_abs_coeff)
        )
    ratios = [float(pt.max_coeff) / pt.log2n**3 for pt in points]
    fitted = median(ratios)
    worst = max(ratios) / fitted
    logger.debug(f"coefficient range: C={fitted:.4g}, worst ratio {worst:.3g}")
    return RangeStudy(points, fitted, worst)
