"""Exact multilinear pseudo-Boolean polynomials over integer variable ids"""

import logging
from collections import namedtuple
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np

from .util import LOGGER_NAME, MissingVariable, Number

logger = logging.getLogger(LOGGER_NAME)

Key = Tuple[int, ...]

# roles
P = "p"
Q = "q"
CARRY = "c"
ANCILLA = "t"
GENERIC = "x"
ROLES = (P, Q, CARRY, ANCILLA, GENERIC)

CHUNK_BITS = 16

Stats = namedtuple("Stats", ["degree", "max_abs_coeff", "term_count"])


def _key(ids: Union[int, Iterable[int]]) -> Key:
    if isinstance(ids, int):
        ids = (ids,)
    key = tuple(sorted(set(ids)))
    if key and key[0] < 1:
        raise ValueError(f"Variable ids start at 1, got {key}")
    return key


def _twice(coeff: Number) -> int:
    doubled = Fraction(coeff) * 2
    if doubled.denominator != 1:
        raise ValueError(f"Coefficient {coeff} is not a multiple of 1/2")
    return doubled.numerator


class PseudoBooleanPolynomial:
    """
    Coefficients are held as twice their value so every entry is an integer;
    keys are sorted tuples of distinct ids and () is the constant term.
    """

    __slots__ = ("_doubled",)

    def __init__(self, terms: Optional[Mapping] = None):
        doubled: Dict[Key, int] = {}
        for ids, coeff in (terms or {}).items():
            key = _key(ids)
            doubled[key] = doubled.get(key, 0) + _twice(coeff)
        self._doubled = {k: v for k, v in doubled.items() if v}

    @classmethod
    def from_doubled(cls, doubled: Mapping[Key, int]) -> "PseudoBooleanPolynomial":
        poly = cls.__new__(cls)
        poly._doubled = {k: v for k, v in doubled.items() if v}
        return poly

    @classmethod
    def constant(cls, value: Number) -> "PseudoBooleanPolynomial":
        return cls({(): value})

    @classmethod
    def variable(cls, var: int, coeff: Number = 1) -> "PseudoBooleanPolynomial":
        return cls({(var,): coeff})

    @property
    def doubled(self) -> Dict[Key, int]:
        return dict(self._doubled)

    @property
    def terms(self) -> Dict[Key, Fraction]:
        return {k: Fraction(v, 2) for k, v in self._doubled.items()}

    @property
    def variables(self) -> frozenset:
        return frozenset(v for key in self._doubled for v in key)

    @property
    def var_count(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self._doubled), default=0)

    def coefficient(self, ids: Union[int, Iterable[int]]) -> Fraction:
        return Fraction(self._doubled.get(_key(ids), 0), 2)

    def items(self) -> Iterator[Tuple[Key, Fraction]]:
        for key in sorted(self._doubled):
            yield key, Fraction(self._doubled[key], 2)

    def __len__(self) -> int:
        return len(self._doubled)

    def __eq__(self, other) -> bool:
        if isinstance(other, PseudoBooleanPolynomial):
            return self._doubled == other._doubled
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._doubled.items()))

    def __add__(self, other) -> "PseudoBooleanPolynomial":
        other = _coerce(other)
        out = dict(self._doubled)
        for key, value in other._doubled.items():
            out[key] = out.get(key, 0) + value
        return PseudoBooleanPolynomial.from_doubled(out)

    __radd__ = __add__

    def __neg__(self) -> "PseudoBooleanPolynomial":
        return PseudoBooleanPolynomial.from_doubled(
            {k: -v for k, v in self._doubled.items()}
        )

    def __sub__(self, other) -> "PseudoBooleanPolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "PseudoBooleanPolynomial":
        return _coerce(other) - self

    def __mul__(self, other) -> "PseudoBooleanPolynomial":
        return multiply(self, _coerce(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PseudoBooleanPolynomial({self})"

    def __str__(self) -> str:
        if not self._doubled:
            return "0"
        parts = []
        # constant last, higher degree first
        for key in sorted(self._doubled, key=lambda k: (-len(k), k)):
            coeff = Fraction(self._doubled[key], 2)
            monomial = "*".join(f"x{v}" for v in key)
            magnitude = abs(coeff)
            if monomial:
                text = monomial if magnitude == 1 else f"{magnitude}*{monomial}"
            else:
                text = str(magnitude)
            sign = "-" if coeff < 0 else "+"
            parts.append(f"{sign} {text}")
        first = parts[0]
        head = first[2:] if first.startswith("+") else "-" + first[2:]
        return " ".join([head] + parts[1:])


def _coerce(value) -> PseudoBooleanPolynomial:
    if isinstance(value, PseudoBooleanPolynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return PseudoBooleanPolynomial.constant(value)
    raise TypeError(f"Cannot combine a polynomial with {type(value).__name__}")


def multiply(
    a: PseudoBooleanPolynomial, b: PseudoBooleanPolynomial
) -> PseudoBooleanPolynomial:
    """
    Product with x² = x applied while merging terms.

    Coefficients live on the half-integer lattice, so at least one factor of
    every pairwise coefficient product must be an integer; two half-odd
    coefficients raise ValueError. The encoders only square polynomials with
    integer coefficients, so the pipeline never takes that branch.
    """
    out: Dict[Key, int] = {}
    for ka, va in a._doubled.items():
        for kb, vb in b._doubled.items():
            product = va * vb
            if product % 2:
                raise ValueError(
                    f"Product of {Fraction(va, 2)} and {Fraction(vb, 2)}"
                    " leaves the half-integer lattice"
                )
            key = ka if ka == kb else tuple(sorted(set(ka) | set(kb)))
            out[key] = out.get(key, 0) + product // 2
    return PseudoBooleanPolynomial.from_doubled(out)


def evaluate(p: PseudoBooleanPolynomial, assignment: Mapping[int, int]) -> Fraction:
    missing = p.variables - set(assignment)
    if missing:
        raise MissingVariable(f"Assignment lacks variables {sorted(missing)}")
    total = 0
    for key, value in p._doubled.items():
        if all(assignment[v] for v in key):
            total += value
    return Fraction(total, 2)


def stats(p: PseudoBooleanPolynomial) -> Stats:
    return Stats(
        degree=p.degree,
        max_abs_coeff=Fraction(
            max((abs(v) for k, v in p._doubled.items() if k), default=0), 2
        ),
        term_count=len(p),
    )


def assignment_bits(start: int, stop: int, width: int) -> np.ndarray:
    """rows are assignments start..stop-1, column i is bit i of the row index"""
    index = np.arange(start, stop, dtype=np.int64)
    return ((index[:, None] >> np.arange(width, dtype=np.int64)) & 1).astype(bool)


def values(p: PseudoBooleanPolynomial, ids: List[int]) -> np.ndarray:
    """2·p at every assignment of ids, the assignment's bit i setting ids[i]"""
    ids = list(ids)
    missing = p.variables - set(ids)
    if missing:
        raise MissingVariable(f"Enumeration lacks variables {sorted(missing)}")
    position = {v: i for i, v in enumerate(ids)}
    width = len(ids)
    size = 1 << width
    bound = sum(abs(v) for v in p._doubled.values())
    dtype = np.int64 if bound < 2**62 else object
    out = np.zeros(size, dtype=dtype)
    step = 1 << min(width, CHUNK_BITS)
    monomials = [
        ([position[v] for v in key], value) for key, value in p._doubled.items()
    ]
    for start in range(0, size, step):
        bits = assignment_bits(start, start + step, width)
        chunk = np.zeros(step, dtype=dtype)
        for columns, value in monomials:
            if columns:
                chunk[bits[:, columns].all(axis=1)] += value
            else:
                chunk += value
        out[start : start + step] = chunk
    return out


def to_text(p: PseudoBooleanPolynomial) -> str:
    lines = [
        f"{p._doubled[key]}/2 : {','.join(str(v) for v in key)}"
        for key in sorted(p._doubled)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def from_text(text: str) -> PseudoBooleanPolynomial:
    doubled = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        coeff, _, ids = line.partition(":")
        numerator, _, denominator = coeff.strip().partition("/")
        if denominator.strip() != "2":
            raise ValueError(f"Expected a /2 coefficient, got {line!r}")
        key = _key(int(v) for v in ids.split(",") if v.strip())
        doubled[key] = doubled.get(key, 0) + int(numerator)
    return PseudoBooleanPolynomial.from_doubled(doubled)


Variable = namedtuple(
    "Variable", ["id", "role", "index", "pair", "product", "description"]
)


class VariableRegistry:
    """Ordered variables; the id of each entry is its 1-based position."""

    def __init__(self, entries: Iterable[Variable] = ()):
        self.entries = tuple(entries)
        seen = set()
        for position, var in enumerate(self.entries, start=1):
            assert var.id == position, f"Variable ids must be consecutive: {var}"
            assert var.role in ROLES, f"Unknown role {var.role}"
            if (var.role, var.index) in seen:
                raise ValueError(f"Duplicate variable {var.role}{var.index}")
            seen.add((var.role, var.index))
            if var.role == ANCILLA:
                assert var.pair is not None, f"Ancilla {var.id} records no pair"
        self._lookup = {(v.role, v.index): v.id for v in self.entries}

    @classmethod
    def for_factors(
        cls, p_positions: Iterable[int], q_positions: Iterable[int], carries: int = 0
    ) -> "VariableRegistry":
        entries = []
        for role, positions in ((P, p_positions), (Q, q_positions)):
            for i in positions:
                vid = len(entries) + 1
                entries.append(Variable(vid, role, i, None, None, f"{role}{i}"))
        for k in range(1, carries + 1):
            vid = len(entries) + 1
            entries.append(Variable(vid, CARRY, k, None, None, f"c{k}"))
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self.entries)

    def __getitem__(self, vid: int) -> Variable:
        if not 1 <= vid <= len(self.entries):
            raise KeyError(vid)
        return self.entries[vid - 1]

    def __eq__(self, other) -> bool:
        if isinstance(other, VariableRegistry):
            return self.entries == other.entries
        return NotImplemented

    def id_of(self, role: str, index: int) -> int:
        return self._lookup[(role, index)]

    def ids(self, role: str) -> List[int]:
        return [v.id for v in self.entries if v.role == role]

    def label(self, vid: int) -> str:
        var = self[vid]
        return f"{var.role}{var.index}"

    def with_ancilla(
        self, pair: Tuple[int, int], product: Optional[Tuple[int, int]] = None
    ) -> Tuple["VariableRegistry", int]:
        vid = len(self.entries) + 1
        index = len(self.ids(ANCILLA)) + 1
        a, b = pair
        if product is None:
            description = f"t{index} = {self.label(a)}*{self.label(b)}"
        else:
            description = f"t{index} = p{product[0]}*q{product[1]}"
        var = Variable(vid, ANCILLA, index, (a, b), product, description)
        return VariableRegistry(self.entries + (var,)), vid

    def to_json(self) -> List[dict]:
        return [
            {
                "id": v.id,
                "role": v.role,
                "index": v.index,
                "pair": list(v.pair) if v.pair else None,
                "description": v.description,
            }
            for v in self.entries
        ]
