"""Exhaustive and simulated-annealing Ising solvers, factor decoding and histograms"""

import json
import logging
from collections import Counter, namedtuple
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .ising import IsingModel, integer_form, scaled_energies
from .pbp import ANCILLA, CARRY, P, Q, VariableRegistry
from .util import LOGGER_NAME, TooLarge, format_exact

logger = logging.getLogger(LOGGER_NAME)

EXACT_LIMIT = 26
EXACT_CHUNK_BITS = 18
DEFAULT_SWEEPS = 1000
DEFAULT_SAMPLES = 100
DEFAULT_T_COLD = 0.1
# restarts per independently seeded chunk
SA_CHUNK = 1000

Record = namedtuple("Record", ["spins", "energy", "count"])
SamplerInfo = namedtuple(
    "SamplerInfo", ["seed", "sweeps", "samples", "t_hot", "t_cold"]
)
SampleSet = namedtuple("SampleSet", ["records", "info"])
FactorReading = namedtuple(
    "FactorReading", ["p", "q", "carries", "ancilla_consistent", "valid"]
)
HistogramEntry = namedtuple(
    "HistogramEntry", ["label", "p", "q", "energy", "count", "rate"]
)


def index_spins(index: np.ndarray, n_spins: int) -> np.ndarray:
    """spin i of state b is +1 when bit i of b is 0"""
    bits = (index[:, None] >> np.arange(n_spins, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int64)


def solve_exact(
    model: IsingModel, limit: int = EXACT_LIMIT
) -> Tuple[Fraction, List[Tuple[int, ...]]]:
    n = model.n_spins
    if n > limit:
        raise TooLarge(f"{n} spins exceed the exhaustive limit {limit}")
    form = integer_form(model)
    size = 1 << n
    step = 1 << min(n, EXACT_CHUNK_BITS)
    best = None
    winners: List[np.ndarray] = []
    for start in range(0, size, step):
        index = np.arange(start, start + step, dtype=np.int64)
        values = scaled_energies(form, index_spins(index, n))
        low = values.min()
        if best is None or low < best:
            best, winners = low, [index[values == low]]
        elif low == best:
            winners.append(index[values == low])
    ground = np.concatenate(winners)
    states = [tuple(int(s) for s in row) for row in index_spins(ground, n)]
    logger.debug(f"exact ground energy over {size} states: {len(states)} minimizers")
    return Fraction(int(best), form.denominator), states


def schedule(t_hot: float, t_cold: float, sweeps: int) -> np.ndarray:
    """geometric temperatures from t_hot to t_cold"""
    if sweeps == 0:
        return np.empty(0)
    if sweeps == 1:
        return np.array([t_cold])
    return t_hot * (t_cold / t_hot) ** (np.arange(sweeps) / (sweeps - 1))


def _anneal_chunk(
    h: np.ndarray,
    J: np.ndarray,
    temperatures: np.ndarray,
    size: int,
    seed: Sequence[int],
) -> Counter:
    rng = np.random.default_rng(seed)
    n = len(h)
    spins = rng.integers(0, 2, size=(size, n)) * 2 - 1
    field = h + spins @ J
    rows = np.arange(size)
    for temperature in temperatures:
        for i in range(n):
            # energy change of flipping spin i
            delta = -2.0 * spins[:, i] * field[:, i]
            accept = (delta <= 0) | (
                rng.random(size) < np.exp(-np.maximum(delta, 0) / temperature)
            )
            if accept.any():
                flipped = rows[accept]
                spins[flipped, i] *= -1
                field[flipped] += 2.0 * spins[flipped, i][:, None] * J[i]
    return Counter(tuple(int(s) for s in row) for row in spins)


def sample_sa(
    model: IsingModel,
    sweeps: int = DEFAULT_SWEEPS,
    samples: int = DEFAULT_SAMPLES,
    t_hot: Optional[float] = None,
    t_cold: float = DEFAULT_T_COLD,
    seed: Optional[int] = None,
    threads: int = 1,
) -> SampleSet:
    """
    `samples` independent Metropolis restarts of single-spin flips under a
    geometric schedule. Restarts run in chunks seeded by (seed, chunk), so the
    result does not depend on `threads`.
    """
    if samples < 1 or sweeps < 0:
        raise ValueError(f"Need samples >= 1 and sweeps >= 0, got {samples}, {sweeps}")
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1)[0])
    n = model.n_spins
    h = np.array([float(v) for v in model.h])
    J = np.zeros((n, n))
    for (i, j), value in model.J.items():
        J[i, j] = J[j, i] = float(value)
    t_hot = float(model.max_parameter() or 1) if t_hot is None else t_hot
    temperatures = schedule(t_hot, t_cold, sweeps)

    sizes = [min(SA_CHUNK, samples - start) for start in range(0, samples, SA_CHUNK)]
    jobs = [(h, J, temperatures, size, [seed, k]) for k, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        counts = sum(pool.map(lambda job: _anneal_chunk(*job), jobs), Counter())

    info = SamplerInfo(seed, sweeps, samples, t_hot, t_cold)
    ss = collect(model, list(counts.elements()), info)
    logger.debug(
        f"sa: {samples} samples, {sweeps} sweeps, {len(ss.records)} distinct states,"
        f" lowest energy {ss.records[0].energy}"
    )
    return ss


def _factor_value(registry, role, bits, length, fixed_leading) -> int:
    value = 1 + ((1 << (length - 1)) if fixed_leading else 0)
    for vid in registry.ids(role):
        value += bits[vid - 1] << registry[vid].index
    return value


def decode(spins: Sequence[int], registry: VariableRegistry, cf) -> FactorReading:
    bits = [(1 - s) // 2 for s in spins[: len(registry)]]
    p = _factor_value(registry, P, bits, cf.l1, cf.fixed_leading)
    q = _factor_value(registry, Q, bits, cf.l2, cf.fixed_leading)
    carries = tuple(bits[vid - 1] for vid in registry.ids(CARRY))
    consistent = all(
        bits[vid - 1] == bits[a - 1] & bits[b - 1]
        for vid, (a, b) in ((v, registry[v].pair) for v in registry.ids(ANCILLA))
    )
    valid = p * q == cf.n and p > 1 and q > 1
    return FactorReading(p, q, carries, consistent, valid)


def make_histogram(
    ss: SampleSet, registry: VariableRegistry, cf
) -> List[HistogramEntry]:
    total = sum(r.count for r in ss.records)
    grouped: Counter = Counter()
    for record in ss.records:
        reading = decode(record.spins, registry, cf) if len(registry) else None
        if reading is not None and reading.valid:
            key = (record.energy, f"({reading.p},{reading.q})", reading.p, reading.q)
        elif reading is not None:
            key = (record.energy, "invalid", reading.p, reading.q)
        else:
            key = (record.energy, "invalid", None, None)
        grouped[key] += record.count
    return [
        HistogramEntry(label, p, q, energy, count, Fraction(count, total))
        for (energy, label, p, q), count in sorted(
            grouped.items(), key=lambda item: (item[0][0], item[0][1], item[0][2] or 0)
        )
    ]


def histogram_frame(entries: List[HistogramEntry]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "energy": [format_exact(e.energy) for e in entries],
            "p": [e.p for e in entries],
            "q": [e.q for e in entries],
            "count": [e.count for e in entries],
            "rate": [float(e.rate) for e in entries],
        },
        columns=["energy", "p", "q", "count", "rate"],
    )


def histogram_csv(entries: List[HistogramEntry]) -> str:
    return histogram_frame(entries).to_csv(index=False)


def histogram_json(entries: List[HistogramEntry]) -> str:
    return json.dumps(
        [
            {
                "label": e.label,
                "p": e.p,
                "q": e.q,
                "energy": format_exact(e.energy),
                "count": e.count,
                "rate": str(e.rate),
            }
            for e in entries
        ],
        indent=2,
    )


def sampleset_json(ss: SampleSet) -> str:
    return json.dumps(
        {
            "info": ss.info._asdict(),
            "records": [
                {
                    "spins": list(r.spins),
                    "energy": format_exact(r.energy),
                    "count": r.count,
                }
                for r in ss.records
            ],
        },
        indent=2,
    )


def sample_exact(model: IsingModel, limit: int = EXACT_LIMIT) -> SampleSet:
    """every ground state once, as a SampleSet"""
    minimum, states = solve_exact(model, limit)
    records = [Record(state, minimum, 1) for state in sorted(states)]
    return SampleSet(records, SamplerInfo(None, 0, len(records), None, None))


def collect(
    model: IsingModel, states: Sequence[Tuple[int, ...]], info: SamplerInfo
) -> SampleSet:
    """count repeated states and attach exact energies, lowest first"""
    counts = Counter(states)
    form = integer_form(model)
    distinct = sorted(counts)
    values = scaled_energies(
        form, np.array(distinct, dtype=np.int64).reshape(len(distinct), model.n_spins)
    )
    records = sorted(
        (
            Record(state, Fraction(int(v), form.denominator), counts[state])
            for state, v in zip(distinct, values)
        ),
        key=lambda r: (r.energy, r.spins),
    )
    return SampleSet(records, info)
