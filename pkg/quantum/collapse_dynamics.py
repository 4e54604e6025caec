# quantum/collapse_dynamics.py
"""
Collapse dynamics: closed-form CSL for H = 0, a norm-preserving SDE
unraveling for general H, and GRW-style discrete localization jumps.

Every trajectory draws all of its randomness from the generator it is given
and returns an immutable TrajectoryRecord.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from config import Config
from .errors import DimensionMismatchError, InvalidStateError, NumericalAbortError
from .hilbert import HermitianOperator, Spectrum, StateVector, eig

logger = logging.getLogger(__name__)

DYNAMICS_KINDS = ('csl-closed', 'csl-sde', 'grw')
WEIGHT_SUM_TOL = 1e-10


@dataclass(frozen=True)
class CslParams:
    """Collapse strength and collapse operator."""

    lam: float
    collapse_op: HermitianOperator

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"collapse strength must be a finite number >= 0, got {self.lam}")
        object.__setattr__(self, 'lam', lam)

    @cached_property
    def spectrum(self) -> Spectrum:
        return eig(self.collapse_op)

    @cached_property
    def class_eigenvalues(self) -> np.ndarray:
        """Per-eigenvector eigenvalue snapped to its class value."""
        spectrum = self.spectrum
        values = spectrum.class_values[spectrum.class_index]
        values.setflags(write=False)
        return values

    def require_collapse(self):
        if self.lam <= 0:
            raise ValueError("closed-form collapse needs a strictly positive collapse strength")


@dataclass(frozen=True, eq=False)
class NoiseSample:
    """Sampled noise path B(t) on an ascending grid starting at 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or len(times) == 0:
            raise ValueError("noise times and values must be equal-length 1-D arrays")
        if times[0] != 0.0 or values[0] != 0.0:
            raise ValueError("noise path must start at t = 0 with B(0) = 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("noise times must be strictly increasing")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)


class NoiseDraw(NamedTuple):
    value: float
    branch: int
    noise_class: int


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """One stochastic realization."""

    seed: int | None
    dynamics: str
    times: np.ndarray
    branch_weights: np.ndarray
    class_weights: np.ndarray
    log_branch_weights: np.ndarray
    noise: np.ndarray
    outcome: int
    collapsed: bool
    final_state: StateVector
    noise_class: int | None = None
    jump_times: tuple = ()
    warnings: tuple = ()
    trajectory_id: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ('times', 'branch_weights', 'class_weights', 'log_branch_weights', 'noise'):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n_times = len(self.times)
        if self.branch_weights.shape[0] != n_times or self.class_weights.shape[0] != n_times:
            raise DimensionMismatchError("weights must have one row per recorded time")
        if np.any(np.abs(self.branch_weights.sum(axis=1) - 1.0) > WEIGHT_SUM_TOL):
            raise InvalidStateError("branch weights do not sum to 1")
        object.__setattr__(self, 'jump_times', tuple(float(t) for t in self.jump_times))
        object.__setattr__(self, 'warnings', tuple(self.warnings))

    @property
    def n_times(self) -> int:
        return len(self.times)

    @property
    def n_classes(self) -> int:
        return self.class_weights.shape[1]

    @property
    def dominant_weight(self) -> float:
        return float(self.class_weights[-1].max())

    def noise_sample(self) -> NoiseSample:
        """Path with the B(0) = 0 anchor prepended when the grid starts after 0."""
        if self.times[0] == 0.0:
            return NoiseSample(self.times, self.noise)
        return NoiseSample(np.concatenate(([0.0], self.times)), np.concatenate(([0.0], self.noise)))


def _check_normalized(psi0: StateVector, params_or_spectrum):
    if not psi0.normalized:
        raise InvalidStateError("initial state must be normalized")
    spectrum = getattr(params_or_spectrum, 'spectrum', params_or_spectrum)
    if psi0.dim != len(spectrum.eigenvalues):
        raise DimensionMismatchError(
            f"state of dimension {psi0.dim} with a collapse operator of dimension {len(spectrum.eigenvalues)}"
        )


def _log_weights(amplitudes: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.log(np.abs(amplitudes) ** 2)


def born_probabilities(psi0: StateVector, spectrum: Spectrum) -> np.ndarray:
    """Born weight of every eigenvalue class."""
    return spectrum.class_weights(psi0)


def _closed_form_log_weights(log_c2: np.ndarray, values: np.ndarray, lam: float, t: float, B: float) -> np.ndarray:
    """ln |c_k|^2 - (B - 2 lam t a_k)^2 / (2 lam t): unnormalized log branch weights."""
    return log_c2 - (B - 2.0 * lam * t * values) ** 2 / (2.0 * lam * t)


def closed_form_weights(psi0: StateVector, params: CslParams, t: float, B: float) -> np.ndarray:
    """
    Unnormalized branch amplitudes c_k exp(-(B - 2 lam t a_k)^2 / (4 lam t)).

    One entry per eigenvector of the collapse operator; members of a
    degeneracy class share the class eigenvalue and therefore the same factor.
    """
    if t <= 0:
        raise ValueError(f"closed-form weights need t > 0, got {t}")
    params.require_collapse()
    _check_normalized(psi0, params)
    c = params.spectrum.components(psi0)
    factor = np.exp(-(B - 2.0 * params.lam * t * params.class_eigenvalues) ** 2 / (4.0 * params.lam * t))
    return c * factor


def sample_noise(psi0: StateVector, params: CslParams, t: float, rng: np.random.Generator) -> NoiseDraw:
    """Draw B(t) from sum_k |c_k|^2 N(2 lam t a_k, lam t)."""
    if t <= 0:
        raise ValueError(f"noise sampling needs t > 0, got {t}")
    params.require_collapse()
    _check_normalized(psi0, params)
    spectrum = params.spectrum
    p = np.abs(spectrum.components(psi0)) ** 2
    p = p / p.sum()
    branch = int(rng.choice(len(p), p=p))
    mean = 2.0 * params.lam * t * params.class_eigenvalues[branch]
    value = float(rng.normal(mean, np.sqrt(params.lam * t)))
    return NoiseDraw(value, branch, int(spectrum.class_index[branch]))


def _bridge(times: np.ndarray, final_value: float, lam: float, rng: np.random.Generator) -> np.ndarray:
    """Brownian bridge from B(0) = 0 to B(T) = final_value, variance rate lam."""
    T = times[-1]
    values = np.empty(len(times))
    s, b_s = 0.0, 0.0
    for idx, t in enumerate(times[:-1]):
        mean = b_s + (t - s) / (T - s) * (final_value - b_s)
        var = lam * (t - s) * (T - t) / (T - s)
        b_s = mean + np.sqrt(var) * rng.standard_normal()
        s = t
        values[idx] = b_s
    values[-1] = final_value
    return values


def _outcome(class_weights: np.ndarray, threshold: float | None) -> tuple:
    if threshold is None:
        threshold = Config.CSL_COLLAPSE_THRESHOLD
    final = class_weights[-1]
    outcome = int(np.argmax(final))
    return outcome, bool(final[outcome] > 1.0 - threshold)


def _check_grid(time_grid) -> np.ndarray:
    times = np.asarray(time_grid, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("time grid is empty")
    if times[0] <= 0:
        raise ValueError("closed-form time grid must start after t = 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return times


def trajectory_closed(psi0: StateVector, params: CslParams, time_grid, rng: np.random.Generator,
                      seed: int | None = None, trajectory_id: int | None = None,
                      threshold: float | None = None) -> TrajectoryRecord:
    """Closed-form CSL trajectory (no Hamiltonian) on the given time grid."""
    times = _check_grid(time_grid)
    draw = sample_noise(psi0, params, float(times[-1]), rng)
    noise = _bridge(times, draw.value, params.lam, rng)

    spectrum = params.spectrum
    c = spectrum.components(psi0)
    log_c2 = _log_weights(c)
    values = params.class_eigenvalues

    log_w = np.empty((len(times), len(c)))
    for idx, (t, B) in enumerate(zip(times, noise)):
        raw = _closed_form_log_weights(log_c2, values, params.lam, t, B)
        log_w[idx] = raw - logsumexp(raw)
    weights = np.exp(log_w)

    phases = np.where(np.abs(c) > 0, c / np.where(np.abs(c) > 0, np.abs(c), 1.0), 0.0)
    final_amps = spectrum.eigenvectors @ (phases * np.sqrt(weights[-1]))
    final_state = StateVector.from_amplitudes(final_amps, psi0.layout)

    class_weights = spectrum.aggregate(weights)
    outcome, collapsed = _outcome(class_weights, threshold)
    return TrajectoryRecord(
        seed=seed,
        dynamics='csl-closed',
        times=times,
        branch_weights=weights,
        class_weights=class_weights,
        log_branch_weights=log_w,
        noise=noise,
        outcome=outcome,
        collapsed=collapsed,
        final_state=final_state,
        noise_class=draw.noise_class,
        trajectory_id=trajectory_id,
        diagnostics={'noise_branch': draw.branch},
    )


def _record_indices(n_steps: int, record_every: int) -> list:
    indices = list(range(0, n_steps + 1, record_every))
    if indices[-1] != n_steps:
        indices.append(n_steps)
    return indices


def trajectory_sde(psi0: StateVector, H: HermitianOperator | None, params: CslParams, dt: float,
                   n_steps: int, rng: np.random.Generator, record_every: int = 1,
                   seed: int | None = None, trajectory_id: int | None = None,
                   threshold: float | None = None) -> TrajectoryRecord:
    """
    Euler-Maruyama integration of
        dpsi = [-iH dt + sqrt(lam)(A - <A>) dW - (lam/2)(A - <A>)^2 dt] psi
    with renormalization after every step. The measurement record follows
    dB = 2 lam <A> dt + sqrt(lam) dW.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    if record_every < 1:
        raise ValueError(f"record_every must be at least 1, got {record_every}")
    _check_normalized(psi0, params)

    warnings = []
    if H is not None:
        if H.dim != psi0.dim:
            raise DimensionMismatchError("Hamiltonian and state dimensions differ")
        h_matrix = np.asarray(H.matrix)
        step_size = dt * H.spectral_norm()
        if step_size > Config.CSL_SDE_STEP_WARN:
            message = (f"dt*|H| = {step_size:.3g} exceeds {Config.CSL_SDE_STEP_WARN:g}; "
                       f"results may carry a large discretization error")
            logger.warning("[SDE] %s", message)
            warnings.append(message)
    else:
        h_matrix = None

    lam = params.lam
    sqrt_lam = np.sqrt(lam)
    a_matrix = np.asarray(params.collapse_op.matrix)
    basis_adjoint = params.spectrum.eigenvectors.conj().T
    record_at = set(_record_indices(n_steps, record_every))
    increments = rng.standard_normal(n_steps) * np.sqrt(dt)

    psi = np.array(psi0.amplitudes, dtype=complex)
    B = 0.0
    times, noise, branch_rows = [], [], []

    def record(step):
        times.append(step * dt)
        noise.append(B)
        branch_rows.append(np.abs(basis_adjoint @ psi) ** 2)

    record(0)
    for step in range(1, n_steps + 1):
        dW = increments[step - 1]
        mean_a = np.vdot(psi, a_matrix @ psi).real
        shifted = a_matrix @ psi - mean_a * psi
        dpsi = sqrt_lam * dW * shifted - 0.5 * lam * dt * (a_matrix @ shifted - mean_a * shifted)
        if h_matrix is not None:
            dpsi = dpsi - 1j * dt * (h_matrix @ psi)
        psi = psi + dpsi
        norm = np.linalg.norm(psi)
        if not np.isfinite(norm) or norm == 0.0:
            raise NumericalAbortError("non-finite state during SDE integration",
                                      trajectory_id=trajectory_id, step=step)
        psi = psi / norm
        B += 2.0 * lam * mean_a * dt + sqrt_lam * dW
        if step in record_at:
            record(step)

    weights = np.array(branch_rows)
    weights = weights / weights.sum(axis=1, keepdims=True)
    class_weights = params.spectrum.aggregate(weights)
    outcome, collapsed = _outcome(class_weights, threshold)
    return TrajectoryRecord(
        seed=seed,
        dynamics='csl-sde',
        times=np.array(times),
        branch_weights=weights,
        class_weights=class_weights,
        log_branch_weights=_log_weights(np.sqrt(weights)),
        noise=np.array(noise),
        outcome=outcome,
        collapsed=collapsed,
        final_state=StateVector.from_amplitudes(psi, psi0.layout),
        warnings=warnings,
        trajectory_id=trajectory_id,
        diagnostics={'step_size': dt * H.spectral_norm() if H is not None else 0.0},
    )


def trajectory_grw(psi0: StateVector, H: HermitianOperator | None, collapse_op: HermitianOperator,
                   lambda_grw: float, r_c: float, t_final: float, dt: float, rng: np.random.Generator,
                   seed: int | None = None, trajectory_id: int | None = None,
                   threshold: float | None = None) -> TrajectoryRecord:
    """
    GRW-style trajectory on the discrete spectrum of the collapse operator.

    Localization events arrive as a Poisson process of rate lambda_grw. Between
    events the state evolves unitarily; at an event the amplitudes are
    multiplied by exp(-(a_k - a0)^2 / (4 r_c^2)) with the centre a0 drawn from
    sum_k |c_k|^2 N(a_k, r_c^2). The noise column holds the latest centre.
    """
    if lambda_grw < 0:
        raise ValueError(f"GRW rate must be >= 0, got {lambda_grw}")
    if r_c <= 0:
        raise ValueError(f"GRW smearing width must be positive, got {r_c}")
    if t_final <= 0 or dt <= 0:
        raise ValueError("t_final and dt must be positive")

    spectrum = eig(collapse_op)
    _check_normalized(psi0, spectrum)
    values = spectrum.class_values[spectrum.class_index]
    basis = spectrum.eigenvectors
    basis_adjoint = basis.conj().T

    if H is not None:
        if H.dim != psi0.dim:
            raise DimensionMismatchError("Hamiltonian and state dimensions differ")
        energies, h_vectors = np.linalg.eigh(np.asarray(H.matrix))
    n_points = max(1, int(round(t_final / dt)))
    grid = np.linspace(0.0, t_final, n_points + 1)

    jump_times = []
    if lambda_grw > 0:
        t = rng.exponential(1.0 / lambda_grw)
        while t <= t_final:
            jump_times.append(t)
            t += rng.exponential(1.0 / lambda_grw)

    def propagate(psi, tau):
        if H is None or tau <= 0:
            return psi
        return h_vectors @ (np.exp(-1j * energies * tau) * (h_vectors.conj().T @ psi))

    psi = np.array(psi0.amplitudes, dtype=complex)
    rows, noise = [], []
    centre = np.nan
    now = 0.0
    jumps = iter(jump_times + [np.inf])
    next_jump = next(jumps)
    for t_grid in grid:
        while next_jump <= t_grid:
            psi = propagate(psi, next_jump - now)
            now = next_jump
            c = basis_adjoint @ psi
            p = np.abs(c) ** 2
            p = p / p.sum()
            k = int(rng.choice(len(p), p=p))
            centre = float(rng.normal(values[k], r_c))
            log_factor = -(values - centre) ** 2 / (4.0 * r_c ** 2)
            log_factor = log_factor - np.max(log_factor[p > 0])
            c = c * np.exp(log_factor)
            norm = np.linalg.norm(c)
            if not np.isfinite(norm) or norm == 0.0:
                raise NumericalAbortError("localization event annihilated the state",
                                          trajectory_id=trajectory_id)
            psi = basis @ (c / norm)
            next_jump = next(jumps)
        psi = propagate(psi, t_grid - now)
        now = t_grid
        psi = psi / np.linalg.norm(psi)
        rows.append(np.abs(basis_adjoint @ psi) ** 2)
        noise.append(centre)

    weights = np.array(rows)
    weights = weights / weights.sum(axis=1, keepdims=True)
    class_weights = spectrum.aggregate(weights)
    outcome, collapsed = _outcome(class_weights, threshold)
    logger.debug("[GRW] trajectory %s: %d jumps", trajectory_id, len(jump_times))
    return TrajectoryRecord(
        seed=seed,
        dynamics='grw',
        times=grid,
        branch_weights=weights,
        class_weights=class_weights,
        log_branch_weights=_log_weights(np.sqrt(weights)),
        noise=np.array(noise),
        outcome=outcome,
        collapsed=collapsed,
        final_state=StateVector.from_amplitudes(psi, psi0.layout),
        jump_times=jump_times,
        trajectory_id=trajectory_id,
    )


def log_amplitude_ratio(record: TrajectoryRecord, i: int, j: int) -> np.ndarray:
    """ln(|amplitude_i| / |amplitude_j|) at every recorded time."""
    return 0.5 * (record.log_branch_weights[:, i] - record.log_branch_weights[:, j])


def fit_suppression_rate(records: Sequence[TrajectoryRecord], i: int, j: int) -> float:
    """
    Slope of the mean log amplitude ratio (branch i over branch j) against t,
    over the trajectories whose noise was drawn around branch j's class.
    """
    if not records:
        raise ValueError("no trajectories to fit")
    winning = [r for r in records if r.diagnostics.get('noise_branch') == j]
    if not winning:
        raise ValueError(f"no trajectory was drawn around branch {j}")
    times = winning[0].times
    ratios = np.array([log_amplitude_ratio(r, i, j) for r in winning])
    slope, _ = np.polyfit(times, ratios.mean(axis=0), 1)
    logger.debug("[FIT] suppression slope %.6g over %d trajectories", slope, len(winning))
    return float(slope)


def survival_curve(records: Sequence[TrajectoryRecord], branch: int) -> tuple:
    """Ensemble-mean weight of one branch at every recorded time."""
    if not records:
        raise ValueError("no trajectories")
    times = records[0].times
    for record in records[1:]:
        if record.times.shape != times.shape or np.any(record.times != times):
            raise ValueError("survival curve needs trajectories on a common time grid")
    weights = np.array([r.branch_weights[:, branch] for r in records])
    return times, weights.mean(axis=0)


def mean_jump_count(records: Sequence[TrajectoryRecord]) -> float:
    return float(np.mean([len(r.jump_times) for r in records]))


__all__ = [
    'DYNAMICS_KINDS',
    'CslParams',
    'NoiseSample',
    'NoiseDraw',
    'TrajectoryRecord',
    'born_probabilities',
    'closed_form_weights',
    'sample_noise',
    'trajectory_closed',
    'trajectory_sde',
    'trajectory_grw',
    'log_amplitude_ratio',
    'fit_suppression_rate',
    'survival_curve',
    'mean_jump_count',
]
