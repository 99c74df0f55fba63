"""State-vector simulation of H(t) = (1 − t/T)·H_B + (t/T)·H_P with H_B = −Σσx"""

import logging
from collections import namedtuple
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .ising import IsingModel, integer_form, scaled_energies
from .solve import SampleSet, SamplerInfo, collect, index_spins, solve_exact
from .util import LOGGER_NAME, NonUnitaryDrift, TooLarge

logger = logging.getLogger(LOGGER_NAME)

EVOLVE_LIMIT = 14
GAP_LIMIT = 12
NORM_TOLERANCE = 1e-9
REFINE_TOLERANCE = 1e-6
MIN_STEPS = 16
MAX_STEPS = 1 << 16
DENSE_LIMIT = 256


class AnnealSchedule(namedtuple("AnnealSchedule", ["total_time", "steps"])):
    """linear interpolation s(t) = t/T; steps=None refines until converged"""

    def __new__(cls, total_time: float, steps: Optional[int] = None):
        if total_time < 0:
            raise ValueError(f"Total time must be nonnegative, got {total_time}")
        if steps is not None and steps < 1:
            raise ValueError(f"Need at least one step, got {steps}")
        return super().__new__(cls, float(total_time), steps)


def problem_diagonal(model: IsingModel) -> np.ndarray:
    """⟨σ|H_P|σ⟩ without the offset; basis index bit i set ⇔ spin i is −1"""
    form = integer_form(model)
    index = np.arange(1 << model.n_spins, dtype=np.int64)
    spins = index_spins(index, model.n_spins)
    values = scaled_energies(form, spins, include_offset=False)
    return np.asarray(values, dtype=float) / form.denominator


def driver(n_spins: int) -> sp.csr_matrix:
    """H_B = −Σ σx as a sparse matrix"""
    size = 1 << n_spins
    index = np.arange(size)
    if n_spins == 0:
        return sp.csr_matrix((size, size))
    rows = np.concatenate([index] * n_spins)
    cols = np.concatenate([index ^ (1 << k) for k in range(n_spins)])
    data = -np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size))


def _propagate(generator, psi: np.ndarray) -> np.ndarray:
    if generator.shape[0] <= DENSE_LIMIT:
        return scipy.linalg.expm(generator.toarray()) @ psi
    return expm_multiply(generator.tocsc(), psi)


def _evolve(
    driver_h: sp.csr_matrix, diagonal: np.ndarray, total_time: float, steps: int
) -> np.ndarray:
    """
    Fourth-order two-point Magnus steps. For the linear schedule the step
    exponent is −i·dt·H(t_mid) + dt³/(12T)·[H_B, H_P], which is anti-Hermitian,
    so every step is exactly unitary.
    """
    size = len(diagonal)
    psi = np.full(size, 1 / np.sqrt(size), dtype=complex)
    if total_time == 0:
        return psi
    problem = sp.diags(diagonal)
    commutator = (driver_h @ problem - problem @ driver_h).tocsr()
    dt = total_time / steps
    correction = commutator * (dt**3 / (12 * total_time))
    for k in range(steps):
        s = (k + 0.5) / steps
        hamiltonian = driver_h * (1 - s) + problem * s
        psi = _propagate(hamiltonian * (-1j * dt) + correction, psi)
    return psi


def evolve(
    model: IsingModel, sched: AnnealSchedule, limit: int = EVOLVE_LIMIT
) -> Tuple[np.ndarray, float]:
    n = model.n_spins
    if n > limit:
        raise TooLarge(f"{n} spins exceed the state-vector limit {limit}")
    diagonal = problem_diagonal(model)
    _, ground = solve_exact(model)
    ground_index = [
        sum(1 << i for i, s in enumerate(state) if s < 0) for state in ground
    ]
    driver_h = driver(n)

    def run(steps):
        psi = _evolve(driver_h, diagonal, sched.total_time, steps)
        norm = np.linalg.norm(psi)
        if abs(norm - 1) > NORM_TOLERANCE:
            raise NonUnitaryDrift(f"State norm drifted to {norm!r} over {steps} steps")
        return psi, float(np.sum(np.abs(psi[ground_index]) ** 2))

    if sched.steps is not None:
        return run(sched.steps)

    steps = max(MIN_STEPS, int(np.ceil(sched.total_time)))
    psi, success = run(steps)
    while steps < MAX_STEPS:
        steps *= 2
        finer, refined = run(steps)
        converged = abs(refined - success) < REFINE_TOLERANCE
        psi, success = finer, refined
        if converged:
            logger.debug(f"evolution converged at {steps} steps, P={success:.9f}")
            return psi, success
    logger.warning(f"evolution not converged within {MAX_STEPS} steps")
    return psi, success


def _hamiltonian(
    driver_dense: np.ndarray, diagonal: np.ndarray, s: float
) -> np.ndarray:
    return (1 - s) * driver_dense + s * np.diag(diagonal)


def _check_gap_size(model: IsingModel, limit: int):
    if model.n_spins > limit:
        raise TooLarge(f"{model.n_spins} spins exceed the dense limit {limit}")


def spectral_gap(
    model: IsingModel, s: float, ground_degeneracy: int = 1, limit: int = GAP_LIMIT
) -> float:
    """E_k(s) − E_0(s) with k = ground_degeneracy"""
    _check_gap_size(model, limit)
    h = _hamiltonian(driver(model.n_spins).toarray(), problem_diagonal(model), s)
    eigenvalues = scipy.linalg.eigh(
        h, eigvals_only=True, subset_by_index=[0, ground_degeneracy]
    )
    return float(eigenvalues[ground_degeneracy] - eigenvalues[0])


def min_gap(
    model: IsingModel,
    resolution: int = 101,
    ground_degeneracy: int = 1,
    limit: int = GAP_LIMIT,
) -> Tuple[float, float]:
    frame = gap_series(model, resolution, ground_degeneracy, limit)
    where = int(frame["gap"].idxmin())
    return float(frame["gap"][where]), float(frame["s"][where])


def gap_series(
    model: IsingModel,
    resolution: int = 101,
    ground_degeneracy: int = 1,
    limit: int = GAP_LIMIT,
) -> pd.DataFrame:
    _check_gap_size(model, limit)
    driver_dense = driver(model.n_spins).toarray()
    diagonal = problem_diagonal(model)
    points = np.linspace(0.0, 1.0, resolution)
    gaps = []
    for s in points:
        eigenvalues = scipy.linalg.eigh(
            _hamiltonian(driver_dense, diagonal, s),
            eigvals_only=True,
            subset_by_index=[0, ground_degeneracy],
        )
        gaps.append(eigenvalues[ground_degeneracy] - eigenvalues[0])
    return pd.DataFrame({"s": points, "gap": gaps})


def success_series(
    model: IsingModel, times: Iterable[float], steps: Optional[int] = None
) -> pd.DataFrame:
    times = list(times)
    probabilities = [evolve(model, AnnealSchedule(T, steps))[1] for T in times]
    return pd.DataFrame({"T": times, "success_probability": probabilities})


def measure(
    model: IsingModel, psi: np.ndarray, samples: int, seed: Optional[int] = None
) -> SampleSet:
    """computational-basis readouts of the final state"""
    probabilities = np.abs(psi) ** 2
    rng = np.random.default_rng(seed)
    drawn = rng.choice(len(psi), size=samples, p=probabilities / probabilities.sum())
    states = [tuple(int(s) for s in row) for row in index_spins(drawn, model.n_spins)]
    return collect(model, states, SamplerInfo(seed, 0, samples, None, None))
