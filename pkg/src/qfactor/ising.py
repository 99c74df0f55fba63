"""Ising models from quadratic cost functions via x = (1 − s)/2"""

import json
import logging
from collections import namedtuple
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .pbp import PseudoBooleanPolynomial
from .util import (
    DIRECT,
    LOGGER_NAME,
    TABLE,
    DegreeTooHigh,
    LengthMismatch,
    Number,
    common_denominator,
    format_exact,
    parse_exact,
)

logger = logging.getLogger(LOGGER_NAME)

# overall factor applied to the substituted cost, per encoding method
ISING_SCALE = {DIRECT: Fraction(1, 2), TABLE: Fraction(2)}


class IsingModel(
    namedtuple("IsingModel", ["n_spins", "h", "J", "offset", "labels"])
):
    """
    Spins are indexed 0..n_spins-1; J holds i < j couplings only. A physical
    model carries the hardware qubit id of each spin in labels.
    """

    def __new__(
        cls,
        n_spins: int,
        h: Sequence[Number],
        J: Mapping[Tuple[int, int], Number],
        offset: Number = 0,
        labels: Optional[Sequence[int]] = None,
    ):
        h = tuple(Fraction(v) for v in h)
        if len(h) != n_spins:
            raise LengthMismatch(f"{len(h)} fields for {n_spins} spins")
        couplings: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), value in J.items():
            if i == j:
                raise ValueError(f"Self-coupling on spin {i}")
            i, j = min(i, j), max(i, j)
            if not 0 <= i < j < n_spins:
                raise ValueError(f"Coupling ({i}, {j}) outside {n_spins} spins")
            couplings[(i, j)] = couplings.get((i, j), 0) + Fraction(value)
        couplings = {k: couplings[k] for k in sorted(couplings) if couplings[k]}
        if labels is not None:
            labels = tuple(labels)
            assert len(labels) == n_spins
        return super().__new__(
            cls, n_spins, h, MappingProxyType(couplings), Fraction(offset), labels
        )

    def scaled(self, factor: Number) -> "IsingModel":
        factor = Fraction(factor)
        return IsingModel(
            self.n_spins,
            [v * factor for v in self.h],
            {k: v * factor for k, v in self.J.items()},
            self.offset * factor,
            self.labels,
        )

    def max_parameter(self) -> Fraction:
        return max(
            [abs(v) for v in self.h] + [abs(v) for v in self.J.values()],
            default=Fraction(0),
        )


def to_ising(
    cf: Union["PseudoBooleanPolynomial", tuple], scale: Optional[Number] = None
) -> IsingModel:
    """cf is a quadratic CostFunction or a bare polynomial over ids 1..n"""
    if isinstance(cf, PseudoBooleanPolynomial):
        poly = cf
        n_spins = max(poly.variables, default=0)
        default = Fraction(1)
    else:
        poly = cf.polynomial
        n_spins = len(cf.registry)
        default = ISING_SCALE.get(cf.method, Fraction(1))
    if poly.degree > 2:
        raise DegreeTooHigh(f"Degree {poly.degree} has no Ising form")
    scale = default if scale is None else Fraction(scale)

    h = [Fraction(0)] * n_spins
    J: Dict[Tuple[int, int], Fraction] = {}
    offset = Fraction(0)
    for key, c in poly.items():
        if not key:
            offset += c
        elif len(key) == 1:
            (i,) = key
            offset += c / 2
            h[i - 1] -= c / 2
        else:
            i, j = key
            offset += c / 4
            h[i - 1] -= c / 4
            h[j - 1] -= c / 4
            J[(i - 1, j - 1)] = J.get((i - 1, j - 1), 0) + c / 4

    model = IsingModel(
        n_spins,
        [v * scale for v in h],
        {k: v * scale for k, v in J.items()},
        offset * scale,
    )
    logger.debug(
        f"ising model: {n_spins} spins, {len(model.J)} couplings, scale {scale}"
    )
    return model


def _check_spins(m: IsingModel, spins: Sequence[int]):
    if len(spins) != m.n_spins:
        raise LengthMismatch(f"{len(spins)} spins for a {m.n_spins}-spin model")
    if any(s not in (-1, 1) for s in spins):
        raise ValueError(f"Spins must be ±1: {list(spins)}")


def energy(
    m: IsingModel, spins: Sequence[int], include_offset: bool = True
) -> Fraction:
    _check_spins(m, spins)
    total = sum((h * s for h, s in zip(m.h, spins)), Fraction(0))
    total += sum((v * spins[i] * spins[j] for (i, j), v in m.J.items()), Fraction(0))
    return total + m.offset if include_offset else total


IntegerForm = namedtuple(
    "IntegerForm", ["denominator", "h", "rows", "cols", "J", "offset"]
)


def integer_form(m: IsingModel) -> IntegerForm:
    """all parameters times one common denominator, as integer arrays"""
    den = common_denominator(list(m.h) + list(m.J.values()) + [m.offset])
    bound = den * (sum(abs(v) for v in m.h) + sum(abs(v) for v in m.J.values()))
    dtype = np.int64 if bound + abs(m.offset * den) < 2**62 else object
    pairs = list(m.J.items())
    return IntegerForm(
        den,
        np.array([int(v * den) for v in m.h], dtype=dtype),
        np.array([i for (i, _), _ in pairs], dtype=np.int64),
        np.array([j for (_, j), _ in pairs], dtype=np.int64),
        np.array([int(v * den) for _, v in pairs], dtype=dtype),
        int(m.offset * den),
    )


def scaled_energies(
    form: IntegerForm, spins: np.ndarray, include_offset: bool = True
) -> np.ndarray:
    """den·energy for each row of a ±1 matrix"""
    spins = spins.astype(form.h.dtype)
    out = spins @ form.h if len(form.h) else np.zeros(len(spins), dtype=form.h.dtype)
    if len(form.J):
        out = out + (spins[:, form.rows] * spins[:, form.cols]) @ form.J
    return out + form.offset if include_offset else out


def energies(
    m: IsingModel, spins: np.ndarray, include_offset: bool = True
) -> list:
    form = integer_form(m)
    spins = np.atleast_2d(np.asarray(spins))
    return [
        Fraction(int(v), form.denominator)
        for v in scaled_energies(form, spins, include_offset)
    ]


def to_json(m: IsingModel) -> dict:
    den = common_denominator(list(m.h) + list(m.J.values()) + [m.offset], base=2)
    doc = {
        "n_spins": m.n_spins,
        "h": [int(v * den) for v in m.h],
        "J": [[i, j, int(v * den)] for (i, j), v in m.J.items()],
        "offset_numerator": int(m.offset * den),
        "denominator": den,
    }
    if m.labels is not None:
        doc["labels"] = list(m.labels)
    return doc


def from_json(doc: Mapping) -> IsingModel:
    den = doc["denominator"]
    return IsingModel(
        doc["n_spins"],
        [Fraction(v, den) for v in doc["h"]],
        {(i, j): Fraction(v, den) for i, j, v in doc["J"]},
        Fraction(doc["offset_numerator"], den),
        doc.get("labels"),
    )


def dumps(m: IsingModel) -> str:
    return json.dumps(to_json(m), indent=2)


def to_text(m: IsingModel) -> str:
    """coupler list: `0 j h_j` for fields, `i j J_ij` for couplings, 1-based"""
    lines = [f"# n_spins={m.n_spins} offset={format_exact(m.offset)}"]
    lines += [f"0 {i + 1} {format_exact(v)}" for i, v in enumerate(m.h) if v]
    lines += [f"{i + 1} {j + 1} {format_exact(v)}" for (i, j), v in m.J.items()]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> IsingModel:
    n_spins, offset = 0, Fraction(0)
    fields: Dict[int, Fraction] = {}
    couplings: Dict[Tuple[int, int], Fraction] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                name, _, value = token.partition("=")
                if name == "n_spins":
                    n_spins = int(value)
                elif name == "offset":
                    offset = parse_exact(value)
            continue
        i, j, value = line.split()
        i, j = int(i), int(j)
        if i == 0:
            fields[j - 1] = parse_exact(value)
        else:
            couplings[(i - 1, j - 1)] = parse_exact(value)
    h = [fields.get(i, Fraction(0)) for i in range(n_spins)]
    return IsingModel(n_spins, h, couplings, offset)
