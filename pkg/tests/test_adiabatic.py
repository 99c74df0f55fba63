import logging
import math

import numpy as np
import pytest

from qfactor.adiabatic import (
    AnnealSchedule,
    driver,
    evolve,
    gap_series,
    measure,
    min_gap,
    problem_diagonal,
    spectral_gap,
    success_series,
)
from qfactor.golden import ISING15, ISING143
from qfactor.ising import IsingModel, energy
from qfactor.solve import index_spins
from qfactor.util import LOGGER_NAME, TooLarge

logger = logging.getLogger(LOGGER_NAME)


class TestOperators:
    def test_diagonal(self):
        diagonal = problem_diagonal(ISING15)
        spins = index_spins(np.arange(16), 4)
        for index in range(16):
            expected = energy(ISING15, spins[index].tolist(), include_offset=False)
            assert diagonal[index] == pytest.approx(float(expected))

    def test_driver(self):
        h = driver(2).toarray()
        assert h.shape == (4, 4)
        assert np.allclose(h, h.T)
        assert np.linalg.eigvalsh(h)[0] == pytest.approx(-2)


class TestSchedule:
    def test_negative_time(self):
        with pytest.raises(ValueError):
            AnnealSchedule(-1)

    def test_steps(self):
        with pytest.raises(ValueError):
            AnnealSchedule(1, steps=0)


class TestEvolve:
    def test_sudden(self):
        psi, success = evolve(ISING15, AnnealSchedule(0))
        assert success == pytest.approx(1 / 16)
        assert np.linalg.norm(psi) == pytest.approx(1)

    def test_sudden_two_grounds(self):
        _, success = evolve(ISING143, AnnealSchedule(0))
        assert success == pytest.approx(2 / 4096)

    @pytest.mark.parametrize("steps", [1, 8, 64], ids=["1", "8", "64"])
    def test_unitary(self, steps):
        psi, success = evolve(ISING15, AnnealSchedule(5, steps=steps))
        assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-9)
        assert 0 <= success <= 1

    def test_large_state(self):
        psi, _ = evolve(ISING143, AnnealSchedule(0.5, steps=2))
        assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-9)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            evolve(IsingModel(15, [1] * 15, {}), AnnealSchedule(1))

    def test_measure(self):
        psi, _ = evolve(ISING15, AnnealSchedule(0))
        a = measure(ISING15, psi, 64, seed=4)
        b = measure(ISING15, psi, 64, seed=4)
        assert a == b
        assert sum(r.count for r in a.records) == 64

    @pytest.mark.slow
    def test_slow_anneal_succeeds(self):
        _, success = evolve(ISING15, AnnealSchedule(100))
        assert success >= 0.9

    @pytest.mark.slow
    def test_longer_is_better(self):
        frame = success_series(ISING15, [2**k for k in range(8)])
        probabilities = list(frame["success_probability"])
        assert probabilities[0] < probabilities[-1]
        assert all(b >= a - 1e-6 for a, b in zip(probabilities, probabilities[1:]))


class TestGap:
    def test_driver_gap(self):
        assert spectral_gap(ISING15, 0.0) == pytest.approx(2)

    def test_problem_gap(self):
        diagonal = np.sort(problem_diagonal(ISING15))
        assert spectral_gap(ISING15, 1.0) == pytest.approx(diagonal[1] - diagonal[0])

    def test_scaling(self):
        base = spectral_gap(ISING15, 1.0)
        assert spectral_gap(ISING15.scaled(3), 1.0) == pytest.approx(3 * base)

    def test_series(self):
        frame = gap_series(ISING15, resolution=11)
        assert list(frame.columns) == ["s", "gap"]
        assert len(frame) == 11
        assert (frame["gap"] > 0).all()

    def test_min_gap(self):
        gap, s = min_gap(ISING15, resolution=21)
        assert 0 < gap <= 2
        assert 0 <= s <= 1

    @pytest.mark.slow
    def test_degenerate_ground(self):
        # the two factor orders share the ground energy
        assert spectral_gap(ISING143, 1.0) == pytest.approx(0, abs=1e-9)
        assert spectral_gap(ISING143, 1.0, ground_degeneracy=2) > 0

    def test_success_series(self):
        frame = success_series(ISING15, [0, 0], steps=4)
        assert list(frame.columns) == ["T", "success_probability"]
        assert math.isclose(frame["success_probability"][0], 1 / 16)
