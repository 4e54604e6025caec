# quantum/ensemble.py
"""
Ensemble service
Runs seeded trajectory ensembles and reduces them to outcome statistics.
Per-trajectory seeds depend only on (master_seed, index), so results do not
depend on the worker count or on completion order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from config import Config
from .collapse_dynamics import (
    DYNAMICS_KINDS,
    CslParams,
    TrajectoryRecord,
    born_probabilities,
    mean_jump_count,
    trajectory_closed,
    trajectory_grw,
    trajectory_sde,
)
from .hilbert import HermitianOperator, StateVector

logger = logging.getLogger(__name__)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed of trajectory `index` under `master_seed`."""
    if master_seed < 0 or index < 0:
        raise ValueError("master seed and trajectory index must be non-negative")
    sequence = np.random.SeedSequence([int(master_seed), int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class TrajectorySpec:
    """Everything one trajectory needs apart from its seed."""

    dynamics: str
    psi0: StateVector
    params: CslParams
    time_grid: tuple = ()
    hamiltonian: HermitianOperator | None = None
    dt: float | None = None
    n_steps: int | None = None
    record_every: int = 1
    grw_rate: float = 0.0
    grw_smearing: float = 1.0
    t_final: float | None = None
    threshold: float | None = None
    name: str = ''

    def __post_init__(self):
        if self.dynamics not in DYNAMICS_KINDS:
            raise ValueError(f"unknown dynamics '{self.dynamics}', expected one of {', '.join(DYNAMICS_KINDS)}")
        object.__setattr__(self, 'time_grid', tuple(float(t) for t in self.time_grid))
        if self.dynamics == 'csl-closed':
            if not self.time_grid:
                raise ValueError("csl-closed needs a time grid")
            if self.hamiltonian is not None:
                raise ValueError("csl-closed is the H = 0 regime; use csl-sde with a Hamiltonian")
        elif self.dynamics == 'csl-sde':
            if not self.dt or not self.n_steps:
                raise ValueError("csl-sde needs dt and n_steps")
        else:
            if not self.dt or not self.t_final:
                raise ValueError("grw needs dt and t_final")

    @property
    def spectrum(self):
        return self.params.spectrum


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    """Outcome counts against Born weights."""

    n_trajectories: int
    counts: tuple
    empirical_probabilities: tuple
    born_probabilities: tuple
    chi_square: float
    p_value: float
    class_values: tuple = ()
    n_collapsed: int = 0
    master_seed: int | None = None
    dynamics: str = ''
    extras: dict = field(default_factory=dict)

    def to_summary(self) -> dict:
        return {
            'n_trajectories': self.n_trajectories,
            'counts': list(self.counts),
            'empirical_probabilities': list(self.empirical_probabilities),
            'born_probabilities': list(self.born_probabilities),
            'chi_square': self.chi_square,
            'p_value': self.p_value,
            'class_values': list(self.class_values),
            'n_collapsed': self.n_collapsed,
            'master_seed': self.master_seed,
            'dynamics': self.dynamics,
            **self.extras,
        }


def born_chi_square(counts: np.ndarray, born: np.ndarray) -> tuple:
    """Chi-square of counts against Born weights over classes with nonzero weight."""
    counts = np.asarray(counts, dtype=float)
    born = np.asarray(born, dtype=float)
    mask = born > 1e-15
    if np.any(counts[~mask] > 0):
        return float('inf'), 0.0
    if mask.sum() < 2:
        return 0.0, 1.0
    n = counts[mask].sum()
    expected = born[mask] / born[mask].sum() * n
    result = stats.chisquare(counts[mask], expected)
    return float(result.statistic), float(result.pvalue)


def compare_outcomes(records_a: Sequence[TrajectoryRecord], records_b: Sequence[TrajectoryRecord]) -> tuple:
    """Contingency chi-square of two outcome samples; returns (statistic, p_value)."""
    n_classes = max(records_a[0].n_classes, records_b[0].n_classes)
    table = np.zeros((2, n_classes))
    for row, records in enumerate((records_a, records_b)):
        for record in records:
            table[row, record.outcome] += 1
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 0.0, 1.0
    statistic, p_value, _, _ = stats.chi2_contingency(table, correction=False)
    return float(statistic), float(p_value)


class EnsembleService:
    """Runs trajectory ensembles on a thread pool."""

    def __init__(self, workers: int | None = None):
        self.workers = workers

    def resolve_workers(self, workers: int | None = None) -> int:
        workers = workers or self.workers or Config.CSL_WORKERS
        return max(1, int(workers))

    def run_trajectory(self, spec: TrajectorySpec, index: int, master_seed: int) -> TrajectoryRecord:
        seed = derive_seed(master_seed, index)
        rng = np.random.default_rng(seed)
        if spec.dynamics == 'csl-closed':
            return trajectory_closed(spec.psi0, spec.params, spec.time_grid, rng,
                                     seed=seed, trajectory_id=index, threshold=spec.threshold)
        if spec.dynamics == 'csl-sde':
            return trajectory_sde(spec.psi0, spec.hamiltonian, spec.params, spec.dt, spec.n_steps, rng,
                                  record_every=spec.record_every, seed=seed, trajectory_id=index,
                                  threshold=spec.threshold)
        return trajectory_grw(spec.psi0, spec.hamiltonian, spec.params.collapse_op, spec.grw_rate,
                              spec.grw_smearing, spec.t_final, spec.dt, rng,
                              seed=seed, trajectory_id=index, threshold=spec.threshold)

    def simulate(self, spec: TrajectorySpec, n: int, master_seed: int,
                 workers: int | None = None) -> list:
        """All n trajectory records, ordered by trajectory index."""
        if n < 1:
            raise ValueError(f"an ensemble needs at least one trajectory, got {n}")
        workers = self.resolve_workers(workers)
        logger.info("[ENSEMBLE] %s: %d %s trajectories, master seed %d, %d worker(s)",
                    spec.name or 'unnamed', n, spec.dynamics, master_seed, workers)

        # Step 1: warm the shared spectrum once so workers only read it
        _ = spec.spectrum

        # Step 2: map preserves index order whatever the completion order
        if workers == 1:
            records = [self.run_trajectory(spec, i, master_seed) for i in range(n)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(lambda i: self.run_trajectory(spec, i, master_seed), range(n)))

        n_warned = sum(1 for r in records if r.warnings)
        if n_warned:
            logger.warning("[ENSEMBLE] %d trajectories reported step-size warnings", n_warned)
        return records

    def summarize(self, records: Sequence[TrajectoryRecord], spec: TrajectorySpec,
                  master_seed: int | None = None) -> EnsembleStats:
        spectrum = spec.spectrum
        counts = np.zeros(spectrum.n_classes, dtype=int)
        for record in records:
            counts[record.outcome] += 1
        n = int(counts.sum())
        born = born_probabilities(spec.psi0, spectrum)
        chi_square, p_value = born_chi_square(counts, born)
        extras = {}
        if spec.dynamics == 'grw':
            extras['mean_jumps'] = mean_jump_count(records)
        return EnsembleStats(
            n_trajectories=n,
            counts=tuple(int(c) for c in counts),
            empirical_probabilities=tuple(float(c) / n for c in counts),
            born_probabilities=tuple(float(b) for b in born),
            chi_square=chi_square,
            p_value=p_value,
            class_values=tuple(float(v) for v in spectrum.class_values),
            n_collapsed=sum(1 for r in records if r.collapsed),
            master_seed=master_seed,
            dynamics=spec.dynamics,
            extras=extras,
        )

    def run(self, spec: TrajectorySpec, n: int, master_seed: int, workers: int | None = None) -> tuple:
        """Simulate and summarize; returns (records, stats)."""
        records = self.simulate(spec, n, master_seed, workers)
        summary = self.summarize(records, spec, master_seed)
        logger.info("[ENSEMBLE] counts=%s chi2=%.4g p=%.4g", list(summary.counts),
                    summary.chi_square, summary.p_value)
        return records, summary


# Singleton instance
ensemble_service = EnsembleService()


def simulate_ensemble(spec: TrajectorySpec, n: int, master_seed: int, workers: int | None = None) -> list:
    return ensemble_service.simulate(spec, n, master_seed, workers)


def run_ensemble(spec: TrajectorySpec, n: int, master_seed: int, workers: int | None = None) -> EnsembleStats:
    """Ensemble outcome statistics with chi-square against Born weights."""
    return ensemble_service.run(spec, n, master_seed, workers)[1]
