# quantum/scenarios.py
"""
Measurement scenarios
Builds particle / apparatus / observer / environment registers, their
tracking unitaries and the collapse operators the dynamics run against.

Conventions: subsystems are ordered particle, apparatus, observer,
environment; |+> is |0>, |-> is |1> and every ready state is |0>. Tracking
maps are completed to unitaries by controlled copies.
"""

from __future__ import annotations

import inspect
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from config import Config
from .collapse_dynamics import CslParams
from .errors import DimensionMismatchError, InvalidStateError, SimulationError
from .hilbert import (
    HermitianOperator,
    StateVector,
    SubsystemLayout,
    embed_operator,
    pauli_x,
    pauli_z,
    tensor,
    unitarity_residual,
)
from .integrated_information import PhiBasisSpec, build_phi_operator, phi_max

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PROJ_0 = np.array([[1, 0], [0, 0]], dtype=complex)
PROJ_1 = np.array([[0, 0], [0, 1]], dtype=complex)

READY_MODES = ('tracks_pointer', 'tracks_superposition', 'superposed_ready')


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    """A named register with its initial state, tracking map and collapse model."""

    name: str
    layout: SubsystemLayout
    initial_state: StateVector
    tracking_unitary: np.ndarray
    collapse_op: HermitianOperator
    params: CslParams
    hamiltonian: HermitianOperator | None = None
    branch_states: tuple = ()
    description: str = ''

    def __post_init__(self):
        unitary = np.array(self.tracking_unitary, dtype=complex)
        dim = self.layout.total_dim
        if unitary.shape != (dim, dim):
            raise DimensionMismatchError(f"tracking map of shape {unitary.shape} on dimension {dim}")
        residual = unitarity_residual(unitary)
        if residual > UNITARY_TOL:
            raise SimulationError(f"tracking map is not unitary (residual {residual:.3e})")
        unitary.setflags(write=False)
        object.__setattr__(self, 'tracking_unitary', unitary)
        if not self.initial_state.normalized:
            raise InvalidStateError("scenario initial state must be normalized")
        object.__setattr__(self, 'branch_states', tuple(self.branch_states))

    @property
    def tracked_state(self) -> StateVector:
        """Initial state after the tracking interaction."""
        return self.initial_state.apply(self.tracking_unitary)


def _qubit(amplitudes) -> StateVector:
    return StateVector.from_amplitudes(amplitudes, SubsystemLayout((2,)))


def _check_amplitudes(alpha: complex, beta: complex):
    total = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(total - 1.0) > 1e-12:
        raise InvalidStateError(f"|alpha|^2 + |beta|^2 = {total:.15g}, expected 1")


def _relabel(state: StateVector, layout: SubsystemLayout) -> StateVector:
    return StateVector(state.amplitudes, layout)


def tracking_map(layout: SubsystemLayout, chain) -> np.ndarray:
    """Controlled copies along consecutive (control, target) pairs, applied in order."""
    unitary = np.eye(layout.total_dim, dtype=complex)
    for control, target in chain:
        unitary = embed_operator(CNOT, [control, target], layout) @ unitary
    return unitary


def pointer_operator(layout: SubsystemLayout, target: int) -> HermitianOperator:
    """Standard collapse observable diag(+1, -1) on one pointer subsystem."""
    return HermitianOperator(embed_operator(pauli_z(), [target], layout), layout)


def symmetric_branch_basis(layout: SubsystemLayout) -> PhiBasisSpec:
    """
    (|0..0> + |1..1>)/sqrt2 and (|0..0> - |1..1>)/sqrt2 followed by the
    remaining computational states.

    The pair differs by a phase flip on one qubit, so both carry the same
    Phi^Max and span the two branch states exactly.
    """
    dim = layout.total_dim
    r = 1 / np.sqrt(2)
    plus, minus = np.zeros(dim, dtype=complex), np.zeros(dim, dtype=complex)
    plus[0], plus[-1] = r, r
    minus[0], minus[-1] = r, -r
    states = [StateVector(plus, layout), StateVector(minus, layout)]
    states += [StateVector.basis(layout, k) for k in range(1, dim - 1)]
    return PhiBasisSpec(layout, tuple(states))


def build_measurement_scenario(alpha: complex = 1 / np.sqrt(2), beta: complex = 1 / np.sqrt(2),
                               with_observer: bool = False, lam: float = 1.0,
                               collapse: str = 'phi') -> ScenarioSpec:
    """
    Particle in alpha|+> + beta|->, apparatus (and optionally observer) ready.

    collapse='phi' uses the Phi operator on the computational basis, which is
    zero on every product branch. collapse='symmetric' builds it on
    symmetric_branch_basis instead, so both branches sit in one nonzero
    eigenspace. collapse='pointer' uses diag(+1, -1) on the apparatus.
    """
    _check_amplitudes(alpha, beta)
    labels = ('p', 'M', 'O') if with_observer else ('p', 'M')
    layout = SubsystemLayout.qubits(len(labels), labels)
    factors = [_qubit([alpha, beta])] + [_qubit([1, 0]) for _ in labels[1:]]
    initial = _relabel(tensor(factors), layout)

    chain = [(0, 1), (1, 2)] if with_observer else [(0, 1)]
    unitary = tracking_map(layout, chain)
    branches = (StateVector.basis(layout, 0), StateVector.basis(layout, layout.total_dim - 1))

    if collapse == 'phi':
        collapse_op = build_phi_operator(PhiBasisSpec.computational(layout))
    elif collapse == 'symmetric':
        collapse_op = build_phi_operator(symmetric_branch_basis(layout))
    elif collapse == 'pointer':
        collapse_op = pointer_operator(layout, 1)
    else:
        raise ValueError(f"collapse must be 'phi', 'symmetric' or 'pointer', got '{collapse}'")

    name = 'measurement-observer' if with_observer else 'measurement'
    return ScenarioSpec(name, layout, initial, unitary, collapse_op, CslParams(lam, collapse_op),
                        branch_states=branches,
                        description='particle tracked by apparatus' + (' and observer' if with_observer else ''))


def environment_overlap(n_env: int, theta: float) -> float:
    """Overlap <E_+|E_-> of n environment qubits each rotated by theta."""
    return float(np.cos(theta) ** n_env)


def _rotation(angle: float) -> np.ndarray:
    """|0> -> cos(angle)|0> + sin(angle)|1>."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _effective_angle(n_env: int, theta: float) -> float:
    return float(np.arccos(np.clip(environment_overlap(n_env, theta), -1.0, 1.0)))


def _use_effective(n_env: int, effective: bool | None) -> bool:
    if effective is None:
        return n_env > Config.CSL_MAX_EXPLICIT_QUBITS
    return bool(effective)


def couple_environment(state: StateVector, n_env: int, theta: float, pointer: int = 1,
                       effective: bool | None = None) -> StateVector:
    """
    Append an environment that records the pointer subsystem's branch.

    Branch k of the pointer basis gets every environment qubit rotated by
    k * theta, so the two branches of a qubit pointer overlap by cos(theta)^n.
    With effective=True (the default above CSL_MAX_EXPLICIT_QUBITS) one
    qubit carrying the same overlap stands in for the n qubits.
    """
    if n_env < 0:
        raise ValueError(f"n_env must be >= 0, got {n_env}")
    if n_env == 0:
        return state
    layout = state.layout
    pointer_dim = layout.dims[pointer]

    if _use_effective(n_env, effective):
        if pointer_dim != 2:
            raise ValueError("the effective environment needs a two-level pointer")
        angle = _effective_angle(n_env, theta)
        env_states = [np.array([1.0, 0.0], dtype=complex), _rotation(angle)[:, 0]]
        env_layout = SubsystemLayout((2,), ('E',))
        logger.info("[ENV] %d environment qubits replaced by one effective qubit (overlap %.3e)",
                    n_env, environment_overlap(n_env, theta))
    else:
        env_states = []
        for k in range(pointer_dim):
            single = _rotation(k * theta)[:, 0]
            env_states.append(tensor([_qubit(single)] * n_env).amplitudes)
        labels = tuple(f"E{i}" for i in range(n_env))
        env_layout = SubsystemLayout(tuple([2] * n_env), labels)

    psi = np.moveaxis(state.as_tensor(), pointer, 0)
    out = np.zeros((layout.total_dim, env_layout.total_dim), dtype=complex)
    for k in range(pointer_dim):
        branch = np.zeros_like(psi)
        branch[k] = psi[k]
        out += np.outer(np.moveaxis(branch, 0, pointer).ravel(), env_states[k])

    return StateVector.from_amplitudes(out.ravel(), layout.concat(env_layout))


def environment_coupling_map(layout: SubsystemLayout, pointer: int, env_indices, angle: float) -> np.ndarray:
    """Controlled rotations pointer -> each environment qubit."""
    controlled = np.kron(PROJ_0, np.eye(2)) + np.kron(PROJ_1, _rotation(angle))
    unitary = np.eye(layout.total_dim, dtype=complex)
    for env in env_indices:
        unitary = embed_operator(controlled, [pointer, env], layout) @ unitary
    return unitary


def build_environment_scenario(alpha: complex = 1 / np.sqrt(2), beta: complex = 1 / np.sqrt(2),
                               n_env: int = 20, theta: float = np.pi / 4, phi_split: float = 1.0,
                               lam: float = 1.0, effective: bool | None = None) -> ScenarioSpec:
    """
    Measurement with observer whose branches are recorded by an environment.

    The Phi operator is diagonal on the two dressed branches with
    phi_+ = phi_max(system branch) and
    phi_- = phi_+ + phi_split * sqrt(1 - overlap^2);
    the rest of the space takes phi_+. theta = 0 leaves the branches degenerate.
    """
    _check_amplitudes(alpha, beta)
    if n_env < 1:
        raise ValueError("the environment scenario needs at least one environment qubit")
    system = build_measurement_scenario(alpha, beta, with_observer=True, lam=lam)
    use_effective = _use_effective(n_env, effective)
    n_qubits = 1 if use_effective else n_env
    angle = _effective_angle(n_env, theta) if use_effective else theta
    env_labels = ('E',) if use_effective else tuple(f"E{i}" for i in range(n_env))
    layout = SubsystemLayout.qubits(3 + n_qubits, system.layout.labels + env_labels)

    env_ready = tensor([_qubit([1, 0])] * n_qubits)
    initial = _relabel(tensor([system.initial_state, env_ready]), layout)
    unitary = environment_coupling_map(layout, 1, range(3, 3 + n_qubits), angle) @ \
        np.kron(system.tracking_unitary, np.eye(2 ** n_qubits))

    # Step 1: dressed branches |+++>|E_+> and |--->|E_->
    branch_plus = _relabel(tensor([system.branch_states[0], env_ready]), layout)
    env_minus = tensor([_qubit(_rotation(angle)[:, 0])] * n_qubits)
    branch_minus = _relabel(tensor([system.branch_states[1], env_minus]), layout)

    # Step 2: eigenvalues split by the distinguishability of the records
    overlap = environment_overlap(n_env, theta)
    phi_plus = phi_max(system.branch_states[0]).phi
    phi_minus = phi_plus + phi_split * np.sqrt(max(0.0, 1.0 - overlap ** 2))
    basis = PhiBasisSpec.completed(layout, [branch_plus, branch_minus])
    values = np.full(layout.total_dim, phi_plus)
    values[1] = phi_minus
    collapse_op = HermitianOperator.from_eigensystem(values, basis.matrix, layout)
    logger.info("[ENV] n_env=%d theta=%.4g overlap=%.3e phi split=%.6g",
                n_env, theta, overlap, phi_minus - phi_plus)

    return ScenarioSpec('environment', layout, initial, unitary, collapse_op, CslParams(lam, collapse_op),
                        branch_states=(branch_plus, branch_minus),
                        description=f'observer branches recorded by {n_env} environment qubits')


def _superposition_projector(alpha: complex, beta: complex) -> np.ndarray:
    s = np.array([alpha, 0, 0, beta], dtype=complex)
    return np.outer(s, s.conj())


def build_ready_state_variants(mode: str, alpha: complex = 1 / np.sqrt(2), beta: complex = 1 / np.sqrt(2),
                               lam: float = 1.0) -> ScenarioSpec:
    """
    Observers that track the pointer basis, the superposition, or either.

    The observer is four-level: ready mode (R or R*) times a reading qubit.
    In mode R the reading copies the apparatus. In mode R* the reading is
    rotated to (|0> + |1>)/sqrt(2) only when particle and apparatus are in
    alpha|00> + beta|11>; other inputs pass through unchanged.
    """
    mode = mode.replace('-', '_')
    if mode not in READY_MODES:
        raise ValueError(f"unknown ready-state mode '{mode}'; expected one of {', '.join(READY_MODES)}")
    _check_amplitudes(alpha, beta)

    # Build on qubits (p, M, mode, reading); the flat index matches (p, M, O).
    qubits = SubsystemLayout.qubits(4)
    layout = SubsystemLayout((2, 2, 4), ('p', 'M', 'O'))
    identity = np.eye(16, dtype=complex)
    mode_r = embed_operator(PROJ_0, [2], qubits)
    mode_rs = embed_operator(PROJ_1, [2], qubits)
    copy_reading = embed_operator(CNOT, [1, 3], qubits)
    pi_s = embed_operator(_superposition_projector(alpha, beta), [0, 1], qubits)
    rotate_reading = pi_s @ embed_operator(HADAMARD, [3], qubits) + (identity - pi_s)
    unitary = (mode_r @ copy_reading + mode_rs @ rotate_reading) @ embed_operator(CNOT, [0, 1], qubits)

    particle = _qubit([alpha, beta])
    ready = _qubit([1, 0])
    observer_ready = {
        'tracks_pointer': _qubit([1, 0]),
        'tracks_superposition': _qubit([0, 1]),
        'superposed_ready': _qubit([1, 1]),
    }[mode]
    initial = _relabel(tensor([particle, ready, observer_ready, ready]), layout)

    # Tracked branches: pointer-tracking R branch and superposition-tracking R* branch
    r = 1 / np.sqrt(2)
    r_branch = np.zeros(16, dtype=complex)
    r_branch[0b0000], r_branch[0b1101] = alpha, beta
    rs_branch = np.zeros(16, dtype=complex)
    rs_branch[[0b0010, 0b0011]] = alpha * r
    rs_branch[[0b1110, 0b1111]] = beta * r
    if mode == 'tracks_pointer':
        branches = [StateVector.basis(layout, 0b0000), StateVector.basis(layout, 0b1101)]
    elif mode == 'tracks_superposition':
        branches = [StateVector.from_amplitudes(rs_branch, layout)]
    else:
        branches = [StateVector.from_amplitudes(r_branch, layout), StateVector.from_amplitudes(rs_branch, layout)]

    collapse_op = build_phi_operator(PhiBasisSpec.completed(layout, branches))
    return ScenarioSpec(f'ready-{mode}', layout, initial, unitary, collapse_op, CslParams(lam, collapse_op),
                        branch_states=tuple(branches),
                        description=f'four-level observer, {mode.replace("_", " ")}')


def build_zeno_scenario(omega: float = 1.0, ratio: float = 100.0) -> ScenarioSpec:
    """
    Qubit with H = (omega/4)(|0><1| + |1><0|) under collapse operator sigma_z.
    lambda is set so that lambda * (delta a)^2 = ratio * omega, delta a = 2.
    """
    if omega <= 0 or ratio <= 0:
        raise ValueError("omega and ratio must be positive")
    layout = SubsystemLayout((2,), ('q',))
    collapse_op = HermitianOperator(pauli_z(), layout)
    hamiltonian = HermitianOperator(0.25 * omega * pauli_x(), layout)
    lam = ratio * omega / 4.0
    initial = StateVector.basis(layout, 0)
    return ScenarioSpec('zeno', layout, initial, np.eye(2), collapse_op, CslParams(lam, collapse_op),
                        hamiltonian=hamiltonian, branch_states=(initial, StateVector.basis(layout, 1)),
                        description=f'Zeno competition, lambda*da^2 = {ratio:g} omega')


def build_two_branch_scenario(p0: float = 0.3, delta_a: float = 1.0, lam: float = 1.0) -> ScenarioSpec:
    """Qubit sqrt(p0)|0> + sqrt(1 - p0)|1> against diag(0, delta_a)."""
    if not 0 <= p0 <= 1:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    if delta_a <= 0:
        raise ValueError(f"delta_a must be positive, got {delta_a}")
    layout = SubsystemLayout((2,), ('q',))
    collapse_op = HermitianOperator.diagonal([0.0, delta_a], layout)
    initial = StateVector.from_amplitudes([np.sqrt(p0), np.sqrt(1 - p0)], layout)
    return ScenarioSpec('two-branch', layout, initial, np.eye(2), collapse_op, CslParams(lam, collapse_op),
                        branch_states=(StateVector.basis(layout, 0), StateVector.basis(layout, 1)),
                        description=f'two branches, Born weights {p0:g}/{1 - p0:g}')


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable
    description: str
    defaults: dict


class ScenarioCatalog:
    """Registry of named scenario builders."""

    def __init__(self):
        self._entries = {}

    def register(self, name: str, builder: Callable, description: str, **defaults):
        self._entries[name] = CatalogEntry(name, builder, description, defaults)

    def names(self) -> list:
        return list(self._entries)

    def get(self, name: str) -> CatalogEntry:
        if name not in self._entries:
            raise ValueError(f"unknown scenario '{name}'; available: {', '.join(self._entries)}")
        return self._entries[name]

    def parameters(self, name: str) -> list:
        entry = self.get(name)
        return [p for p in inspect.signature(entry.builder).parameters if p not in entry.defaults]

    def build(self, name: str, **kwargs) -> ScenarioSpec:
        entry = self.get(name)
        allowed = set(self.parameters(name))
        unknown = sorted(set(kwargs) - allowed)
        if unknown:
            raise ValueError(f"scenario '{name}' does not accept: {', '.join(unknown)}")
        return entry.builder(**entry.defaults, **kwargs)

    def describe(self) -> list:
        return [(e.name, e.description, self.parameters(e.name)) for e in self._entries.values()]


scenario_catalog = ScenarioCatalog()
scenario_catalog.register('two-branch', build_two_branch_scenario,
                          'qubit with two nondegenerate branches')
scenario_catalog.register('measurement', build_measurement_scenario,
                          'particle tracked by an apparatus', with_observer=False)
scenario_catalog.register('measurement-observer', build_measurement_scenario,
                          'particle tracked by apparatus and observer', with_observer=True)
scenario_catalog.register('degeneracy', build_measurement_scenario,
                          'observer branches sharing one nonzero Phi eigenvalue',
                          with_observer=True, collapse='symmetric')
scenario_catalog.register('environment', build_environment_scenario,
                          'observer branches split by environment records')
scenario_catalog.register('ready-state', build_ready_state_variants,
                          'observer ready state R, R* or their superposition')
scenario_catalog.register('zeno', build_zeno_scenario,
                          'qubit Rabi drive against sigma_z collapse')
