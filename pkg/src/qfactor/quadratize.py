"""Reduce cubic and quartic terms to quadratic ones with ancilla penalties.

An ancilla t standing for x_a·x_b is enforced by the gadget
x_a·x_b − 2·x_a·t − 2·x_b·t + 3·t, which is 0 when t = x_a·x_b and at least 1
otherwise. Each substitution into a term with coefficient a adds 2|a| to the
gadget weight of the ancilla it used.
"""

import logging
from collections import Counter, namedtuple
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np

from .pbp import (
    ANCILLA,
    P,
    Q,
    Key,
    PseudoBooleanPolynomial,
    VariableRegistry,
    values,
)
from .util import (
    LOGGER_NAME,
    TABLE,
    DegreeTooHigh,
    ReductionBroken,
    TooLarge,
)

logger = logging.getLogger(LOGGER_NAME)

MAX_DEGREE = 4
VERIFY_LIMIT = 24

# coefficients of the gadget terms x_a·x_b, x_a·t, x_b·t, t
GADGET = (1, -2, -2, 3)

SubstitutionLedger = namedtuple("SubstitutionLedger", ["pairs", "penalty_weights"])

ReductionReport = namedtuple(
    "ReductionReport", ["minimum", "n_vars", "n_minimizers", "n_consistent"]
)


def empty_ledger() -> SubstitutionLedger:
    return SubstitutionLedger(pairs={}, penalty_weights={})


def greedy_reduce(
    doubled: Dict[Key, int], next_id: int
) -> Tuple[Dict[Key, int], List[Tuple[Tuple[int, int], int, int]]]:
    """
    Repeatedly substitute the pair occurring in the most higher-order terms
    (ties to the lexicographically smallest pair). Returns the rewritten terms
    and (pair, ancilla, doubled weight) per new ancilla.
    """
    terms = dict(doubled)
    made = []
    while True:
        high = [key for key in terms if len(key) > 2]
        if not high:
            return terms, made
        counts = Counter(pair for key in high for pair in combinations(key, 2))
        pair, _ = min(counts.items(), key=lambda item: (-item[1], item[0]))
        ancilla = next_id
        next_id += 1
        weight = 0
        for key in high:
            if pair[0] in key and pair[1] in key:
                value = terms.pop(key)
                reduced = tuple(
                    sorted([v for v in key if v not in pair] + [ancilla])
                )
                terms[reduced] = terms.get(reduced, 0) + value
                weight += 2 * abs(value)
        logger.debug(f"greedy pair {pair} -> {ancilla} (weight {Fraction(weight, 2)})")
        made.append((pair, ancilla, weight))


def product_pairs(key: Key, registry: VariableRegistry) -> List[Tuple[int, int]]:
    """(p-index, q-index) products that reduce a higher-order term"""
    ps = sorted(registry[v].index for v in key if registry[v].role == P)
    qs = sorted(registry[v].index for v in key if registry[v].role == Q)
    if not ps or not qs:
        return []
    pairs = [(ps[0], qs[0])]
    if len(ps) > 1 and len(qs) > 1:
        pairs.append((ps[-1], qs[-1]))
    return pairs


def serpentine(products) -> List[Tuple[int, int]]:
    """rows by p-index, alternating ascending and descending q-index"""
    rows = sorted({i for i, _ in products})
    ordered = []
    for rank, i in enumerate(rows):
        row = sorted(j for r, j in products if r == i)
        ordered.extend((i, j) for j in (row if rank % 2 == 0 else reversed(row)))
    return ordered


def _reduce_products(doubled: Dict[Key, int], registry: VariableRegistry):
    needed = set()
    for key in doubled:
        if len(key) > 2:
            needed.update(product_pairs(key, registry))
    ancillas = {}
    for i, j in serpentine(needed):
        pair = (registry.id_of(P, i), registry.id_of(Q, j))
        registry, ancillas[(i, j)] = registry.with_ancilla(pair, product=(i, j))

    terms: Dict[Key, int] = {}
    weights: Dict[int, int] = {}
    for key, value in doubled.items():
        if len(key) > 2:
            for i, j in product_pairs(key, registry):
                ancilla = ancillas[(i, j)]
                replaced = registry[ancilla].pair
                key = tuple(sorted([v for v in key if v not in replaced] + [ancilla]))
                weights[ancilla] = weights.get(ancilla, 0) + 2 * abs(value)
        terms[key] = terms.get(key, 0) + value
    return terms, registry, weights


def quadratize(cf):
    """cf: a CostFunction; returns (reduced CostFunction, SubstitutionLedger)"""
    poly = cf.polynomial
    if poly.degree > MAX_DEGREE:
        raise DegreeTooHigh(f"Degree {poly.degree} exceeds {MAX_DEGREE}")
    if poly.degree <= 2:
        return cf, empty_ledger()

    registry = cf.registry
    weights: Dict[int, int] = {}
    terms = poly.doubled
    if cf.method == TABLE:
        terms, registry, weights = _reduce_products(terms, registry)
    terms, made = greedy_reduce(terms, len(registry) + 1)
    for pair, ancilla, weight in made:
        registry, vid = registry.with_ancilla(pair)
        assert vid == ancilla
        weights[ancilla] = weight

    pairs = {}
    for vid in registry.ids(ANCILLA):
        a, b = registry[vid].pair
        pairs[(a, b)] = vid
        weight = weights[vid]
        assert weight > 0, f"Ancilla {vid} reduces no term"
        for gadget_key, factor in zip(
            ((a, b), (a, vid), (b, vid), (vid,)), GADGET
        ):
            gadget_key = tuple(sorted(gadget_key))
            terms[gadget_key] = terms.get(gadget_key, 0) + factor * weight

    reduced = PseudoBooleanPolynomial.from_doubled(terms)
    assert reduced.degree <= 2
    logger.debug(
        f"quadratized {poly.var_count} -> {reduced.var_count} variables,"
        f" {len(pairs)} ancillas"
    )
    ledger = SubstitutionLedger(
        pairs=pairs,
        penalty_weights={vid: Fraction(w, 2) for vid, w in weights.items()},
    )
    return cf._replace(polynomial=reduced, registry=registry), ledger


def _assignment(index: int, ids: List[int]) -> Dict[int, int]:
    return {vid: (index >> i) & 1 for i, vid in enumerate(ids)}


def verify_reduction(original, reduced, ledger, limit: int = VERIFY_LIMIT):
    ids = list(range(1, len(reduced.registry) + 1))
    if len(ids) > limit:
        raise TooLarge(f"{len(ids)} variables exceed the exhaustive limit {limit}")
    position = {vid: i for i, vid in enumerate(ids)}

    red = values(reduced.polynomial, ids)
    org = values(original.polynomial, ids)
    index = np.arange(1 << len(ids), dtype=np.int64)
    consistent = np.ones(len(index), dtype=bool)

    def bit(v):
        return (index >> position[v]) & 1

    for (a, b), t in ledger.pairs.items():
        consistent &= bit(t) == (bit(a) & bit(b))

    def broken(message, mask):
        where = int(np.flatnonzero(mask)[0])
        raise ReductionBroken(message, counterexample=_assignment(where, ids))

    if np.any(consistent & (red != org)):
        broken("penalty active on a consistent assignment", consistent & (red != org))
    if np.any(~consistent & (red <= org)):
        broken("penalty fails to dominate", ~consistent & (red <= org))

    minimum = red.min()
    if minimum != org.min():
        broken("minimum not preserved", red == minimum)
    minimizers = red == minimum
    if np.any(minimizers & ~consistent):
        broken("minimizer with inconsistent ancilla", minimizers & ~consistent)
    off_argmin = minimizers & (org != minimum)
    if np.any(off_argmin):
        broken("minimizer projects off the original argmin", off_argmin)

    return ReductionReport(
        minimum=Fraction(int(minimum), 2),
        n_vars=len(ids),
        n_minimizers=int(minimizers.sum()),
        n_consistent=int(consistent.sum()),
    )


def ledger_json(ledger: SubstitutionLedger, registry: VariableRegistry) -> List[dict]:
    return [
        {
            "ancilla": t,
            "pair": [a, b],
            "description": registry[t].description,
            "weight": str(ledger.penalty_weights[t]),
        }
        for (a, b), t in ledger.pairs.items()
    ]
