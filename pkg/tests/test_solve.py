import logging
from fractions import Fraction

import numpy as np
import pytest
from data.factoring_vectors import CARRIES143, GROUND15, GROUND143

from qfactor.golden import ISING15, ISING143, model143
from qfactor.ising import IsingModel
from qfactor.solve import (
    decode,
    histogram_csv,
    histogram_frame,
    histogram_json,
    index_spins,
    make_histogram,
    sample_exact,
    sample_sa,
    sampleset_json,
    schedule,
    solve_exact,
)
from qfactor.util import LOGGER_NAME, TooLarge

logger = logging.getLogger(LOGGER_NAME)


@pytest.fixture(scope="module")
def reduced143():
    return model143()[2]


class TestExact:
    def test_15(self):
        assert solve_exact(ISING15) == (0, [GROUND15])

    def test_143(self, reduced143):
        minimum, states = solve_exact(ISING143)
        assert minimum == 0
        assert sorted(s[:4] for s in states) == sorted(g for g, _ in GROUND143)
        registry = reduced143.registry
        readings = [decode(s, registry, reduced143) for s in states]
        readings = {(r.p, r.q): r for r in readings}
        assert set(readings) == {pq for _, pq in GROUND143}
        for reading in readings.values():
            assert reading.valid
            assert reading.ancilla_consistent
            assert reading.carries == CARRIES143

    def test_limit(self):
        with pytest.raises(TooLarge):
            solve_exact(ISING15, limit=3)

    def test_index_spins(self):
        assert index_spins(np.array([1, 2]), 2).tolist() == [[-1, 1], [1, -1]]


class TestDecode:
    def test_all_zero_bits(self, reduced143):
        reading = decode([1] * 12, reduced143.registry, reduced143)
        assert (reading.p, reading.q) == (9, 9)
        assert not reading.valid
        assert reading.ancilla_consistent


class TestAnnealing:
    def test_schedule(self):
        temps = schedule(10.0, 0.1, 3)
        assert temps[0] == pytest.approx(10.0)
        assert temps[-1] == pytest.approx(0.1)
        assert temps[1] == pytest.approx(1.0)
        assert schedule(10.0, 0.1, 1).tolist() == [0.1]

    def test_finds_ground(self):
        ss = sample_sa(ISING15, sweeps=200, samples=50, seed=1)
        assert ss.records[0].energy == 0
        assert ss.records[0].spins == GROUND15
        assert sum(r.count for r in ss.records) == 50

    def test_settles_downhill(self):
        ss = sample_sa(IsingModel(2, [1, -1], {}), sweeps=50, samples=20, seed=0)
        records = [(r.spins, r.energy, r.count) for r in ss.records]
        assert records == [((-1, 1), -2, 20)]

    def test_finds_143_ground(self, reduced143):
        ss = sample_sa(ISING143, samples=100, seed=0)
        assert ss.records[0].energy == 0
        assert decode(ss.records[0].spins, reduced143.registry, reduced143).valid

    def test_seeded(self):
        a = sample_sa(ISING15, sweeps=50, samples=30, seed=7)
        b = sample_sa(ISING15, sweeps=50, samples=30, seed=7)
        assert a == b

    def test_threads_do_not_change_result(self):
        a = sample_sa(ISING15, sweeps=20, samples=2500, seed=11, threads=1)
        b = sample_sa(ISING15, sweeps=20, samples=2500, seed=11, threads=3)
        assert a == b

    def test_not_below_exact(self):
        ss = sample_sa(ISING143, sweeps=50, samples=40, seed=2)
        assert min(r.energy for r in ss.records) >= solve_exact(ISING143)[0]

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            sample_sa(ISING15, samples=0)

    def test_json(self):
        doc = sampleset_json(sample_sa(ISING15, sweeps=10, samples=5, seed=0))
        assert '"sweeps": 10' in doc


class TestHistogram:
    def test_143(self, reduced143):
        ss = sample_exact(ISING143)
        entries = make_histogram(ss, reduced143.registry, reduced143)
        assert [e.label for e in entries] == ["(11,13)", "(13,11)"]
        assert all(e.rate == Fraction(1, 2) for e in entries)

    def test_invalid_grouped(self, reduced143):
        ss = sample_sa(ISING143, sweeps=0, samples=200, seed=5)
        entries = make_histogram(ss, reduced143.registry, reduced143)
        assert sum(e.count for e in entries) == 200
        assert sum(e.rate for e in entries) == 1

    def test_exports(self, reduced143):
        ss = sample_exact(ISING143)
        entries = make_histogram(ss, reduced143.registry, reduced143)
        csv = histogram_csv(entries)
        assert csv.splitlines()[0] == "energy,p,q,count,rate"
        assert csv.splitlines()[1] == "0,11,13,1,0.5"
        assert list(histogram_frame(entries)["p"]) == [11, 13]
        assert '"label": "(13,11)"' in histogram_json(entries)


@pytest.mark.slow
def test_sa_59989():
    from qfactor.encoders import PRESETS, build_block_system, encode_table
    from qfactor.ising import to_ising
    from qfactor.quadratize import quadratize

    layout = PRESETS[59989]
    bs = build_block_system(59989, layout["l1"], layout["l2"], layout["widths"])
    reduced, _ = quadratize(encode_table(bs))
    model = to_ising(reduced)
    for seed in range(20):
        ss = sample_sa(model, samples=10_000, seed=seed, threads=4)
        ground = [r for r in ss.records if r.energy == 0]
        if ground:
            readings = [decode(r.spins, reduced.registry, reduced) for r in ground]
            assert all(r.valid and r.ancilla_consistent for r in readings)
            assert {(r.p, r.q) for r in readings} <= {(251, 239), (239, 251)}
            return
    pytest.fail("no valid factorization of 59989 in 20 seeded runs")


@pytest.mark.slow
def test_zero_energy_always_factors(reduced143):
    ss = sample_sa(ISING143, sweeps=100, samples=100_000, seed=0, threads=4)
    assert sum(r.count for r in ss.records) == 100_000
    ground = [r for r in ss.records if r.energy == 0]
    assert ground
    for record in ground:
        reading = decode(record.spins, reduced143.registry, reduced143)
        assert reading.valid
        assert reading.ancilla_consistent
        assert reading.carries == CARRIES143
