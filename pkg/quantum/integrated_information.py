# quantum/integrated_information.py
"""
Integrated information of pure states, proxied by entanglement.

Phi at a grain is the smallest entanglement entropy over the bipartitions of
the grain's blocks. Phi^Max is the largest grain value over admissible grains.
A grain is admissible when every multi-subsystem block is internally
correlated: grouping independent elements into one block cannot create
integration. The finest grain is always admissible.

Admissibility is a threshold test (Config.CSL_ADMISSIBILITY_TOL, in nats),
so Phi^Max is discontinuous near it. Two Bell pairs score 0, but the same
pairs with a perturbation of order 1e-4 carry mutual information above
1e-10 across the pairs, the crossed grain becomes admissible and Phi^Max
jumps to 2 ln 2. Raise the tolerance to treat such states as independent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from config import Config
from .errors import IncompleteBasisError, InvalidGrainError, InvalidStateError
from .hilbert import (
    HermitianOperator,
    StateVector,
    SubsystemLayout,
    mutual_information,
    tensor,
)

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12
GRAM_TOL = 1e-10


@dataclass(frozen=True)
class Grain:
    """Set partition of the subsystem indices into at least two blocks."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in block)) for block in self.blocks)
        if len(blocks) < 2:
            raise InvalidGrainError("a grain needs at least two blocks")
        if any(not block for block in blocks):
            raise InvalidGrainError("grain blocks must be nonempty")
        members = [i for block in blocks for i in block]
        if len(members) != len(set(members)):
            raise InvalidGrainError(f"grain blocks overlap: {blocks}")
        object.__setattr__(self, 'blocks', blocks)

    @property
    def n_subsystems(self) -> int:
        return sum(len(block) for block in self.blocks)

    def validate_for(self, layout: SubsystemLayout):
        members = sorted(i for block in self.blocks for i in block)
        if members != list(range(layout.n_subsystems)):
            raise InvalidGrainError(
                f"grain {self} does not cover the {layout.n_subsystems} subsystems of the layout"
            )

    def __str__(self):
        return '{' + ','.join(_format_block(b) for b in self.blocks) + '}'


@dataclass(frozen=True)
class Bipartition:
    """Two-sided split of a grain's blocks."""

    side_a: tuple
    side_b: tuple

    def __post_init__(self):
        side_a = tuple(tuple(block) for block in self.side_a)
        side_b = tuple(tuple(block) for block in self.side_b)
        if not side_a or not side_b:
            raise InvalidGrainError("both sides of a bipartition must be nonempty")
        object.__setattr__(self, 'side_a', side_a)
        object.__setattr__(self, 'side_b', side_b)

    @property
    def subsystems_a(self) -> tuple:
        return tuple(sorted(i for block in self.side_a for i in block))

    @property
    def subsystems_b(self) -> tuple:
        return tuple(sorted(i for block in self.side_b for i in block))

    def __str__(self):
        return f"{_format_block(self.subsystems_a)}|{_format_block(self.subsystems_b)}"


@dataclass(frozen=True)
class PhiResult:
    phi: float
    minimizing_bipartition: Bipartition | None = None
    maximizing_grain: Grain | None = None
    measure: str = 'von-neumann'

    def __post_init__(self):
        if self.phi < 0:
            raise ValueError(f"phi must be non-negative, got {self.phi}")


@dataclass(frozen=True)
class GrainRow:
    """Phi of one grain, as reported per grain."""

    grain: Grain
    admissible: bool
    bipartition: Bipartition
    phi: float


@dataclass(frozen=True, eq=False)
class PhiBasisSpec:
    """Orthonormal basis in which the Phi operator is diagonal."""

    layout: SubsystemLayout
    basis_states: tuple

    def __post_init__(self):
        states = tuple(self.basis_states)
        dim = self.layout.total_dim
        if any(s.dim != dim for s in states):
            raise IncompleteBasisError("basis states do not match the layout dimension")
        if len(states) != dim:
            raise IncompleteBasisError(f"{len(states)} basis states for a space of dimension {dim}")
        gram_error = float(np.max(np.abs(self.matrix_of(states).conj().T @ self.matrix_of(states) - np.eye(dim))))
        if gram_error > GRAM_TOL:
            raise IncompleteBasisError(f"basis is not orthonormal (Gram error {gram_error:.3e})")
        object.__setattr__(self, 'basis_states', states)

    @staticmethod
    def matrix_of(states) -> np.ndarray:
        return np.column_stack([s.amplitudes for s in states])

    @property
    def matrix(self) -> np.ndarray:
        return self.matrix_of(self.basis_states)

    @classmethod
    def computational(cls, layout: SubsystemLayout) -> PhiBasisSpec:
        return cls(layout, tuple(StateVector.basis(layout, k) for k in range(layout.total_dim)))

    @classmethod
    def completed(cls, layout: SubsystemLayout, states: Sequence[StateVector]) -> PhiBasisSpec:
        """Extend orthonormal states to a full basis (QR against the identity)."""
        states = list(states)
        dim = layout.total_dim
        head = cls.matrix_of(states) if states else np.zeros((dim, 0), dtype=complex)
        q, _ = linalg.qr(np.hstack([head, np.eye(dim, dtype=complex)]), mode='economic')
        extra = [StateVector.from_amplitudes(q[:, k], layout) for k in range(len(states), dim)]
        return cls(layout, tuple(states) + tuple(extra))


def _format_block(block) -> str:
    return '{' + ','.join(str(i) for i in block) + '}'


def schmidt_probabilities(state: StateVector, side_a: Sequence[int]) -> np.ndarray:
    """Squared Schmidt coefficients of a pure state across side_a | rest."""
    layout = state.layout
    side_a = sorted(side_a)
    rest = [i for i in range(layout.n_subsystems) if i not in side_a]
    if not side_a or not rest:
        raise InvalidGrainError("a cut needs subsystems on both sides")
    psi = state.as_tensor().transpose(side_a + rest).reshape(layout.block_dim(side_a), -1)
    p = linalg.svdvals(psi) ** 2
    return p / p.sum()


def _von_neumann(p: np.ndarray) -> float:
    p = p[p > 1e-15]
    return max(0.0, float(-np.sum(p * np.log(p))))


def _renyi_2(p: np.ndarray) -> float:
    return max(0.0, float(-np.log(np.sum(p ** 2))))


def _unimplemented(name: str) -> Callable:
    def measure(p):
        raise NotImplementedError(f"entanglement measure '{name}' is not implemented")
    return measure


ENTANGLEMENT_MEASURES = {
    'von-neumann': _von_neumann,
    'renyi-2': _renyi_2,
    'relative-entropy': _unimplemented('relative-entropy'),
    'squashed': _unimplemented('squashed'),
    'negativity': _unimplemented('negativity'),
}


def get_measure(name: str) -> Callable:
    try:
        return ENTANGLEMENT_MEASURES[name]
    except KeyError:
        raise ValueError(f"unknown entanglement measure '{name}'; "
                         f"available: {', '.join(sorted(ENTANGLEMENT_MEASURES))}") from None


def cut_entropy(state: StateVector, side_a: Sequence[int], measure: str = 'von-neumann') -> float:
    return get_measure(measure)(schmidt_probabilities(state, side_a))


def _restricted_growth_strings(n: int):
    labels = [0] * n

    def extend(i, top):
        if i == n:
            yield tuple(labels)
            return
        for v in range(top + 2):
            labels[i] = v
            yield from extend(i + 1, max(top, v))

    yield from extend(1, 0)


def enumerate_grains(layout) -> list:
    """All set partitions with >= 2 blocks, in restricted-growth-string order."""
    n = layout.n_subsystems if isinstance(layout, SubsystemLayout) else int(layout)
    if n < 2:
        logger.info("[PHI] single-subsystem layout has no grains; Phi is 0 by convention")
        return []
    grains = []
    for labels in _restricted_growth_strings(n):
        n_blocks = max(labels) + 1
        if n_blocks < 2:
            continue
        blocks = tuple(tuple(i for i in range(n) if labels[i] == b) for b in range(n_blocks))
        grains.append(Grain(blocks))
    return grains


def enumerate_bipartitions(grain: Grain) -> list:
    """Side A always holds block 0; other blocks join A by increasing bitmask."""
    first, others = grain.blocks[0], grain.blocks[1:]
    result = []
    for mask in range((1 << len(others)) - 1):
        side_a = (first,) + tuple(b for k, b in enumerate(others) if mask >> k & 1)
        side_b = tuple(b for k, b in enumerate(others) if not mask >> k & 1)
        result.append(Bipartition(side_a, side_b))
    return result


def block_is_integrated(state: StateVector, block: Sequence[int], tol: float | None = None) -> bool:
    """True when no split of the block leaves its two parts uncorrelated."""
    if tol is None:
        tol = Config.CSL_ADMISSIBILITY_TOL
    block = list(block)
    if len(block) < 2:
        return True
    head, tail = block[0], block[1:]
    for mask in range((1 << len(tail)) - 1):
        part_a = [head] + [b for k, b in enumerate(tail) if mask >> k & 1]
        part_b = [b for k, b in enumerate(tail) if not mask >> k & 1]
        if mutual_information(state, part_a, part_b) <= tol:
            return False
    return True


def grain_is_admissible(state: StateVector, grain: Grain, tol: float | None = None) -> bool:
    return all(block_is_integrated(state, block, tol) for block in grain.blocks)


def _check_state(state: StateVector):
    if not state.normalized:
        raise InvalidStateError("Phi is defined for normalized states")


def min_bipartition_entropy(state: StateVector, grain: Grain, measure: str = 'von-neumann') -> PhiResult:
    """Phi of one grain: minimum cut entropy over its bipartitions."""
    _check_state(state)
    grain.validate_for(state.layout)
    best_value, best_cut = None, None
    for cut in enumerate_bipartitions(grain):
        value = cut_entropy(state, cut.subsystems_a, measure)
        if best_value is None or value < best_value - TIE_TOL:
            best_value, best_cut = value, cut
    return PhiResult(best_value, best_cut, grain, measure)


def phi_by_grain(state: StateVector, measure: str = 'von-neumann') -> list:
    _check_state(state)
    rows = []
    for grain in enumerate_grains(state.layout):
        result = min_bipartition_entropy(state, grain, measure)
        rows.append(GrainRow(grain, grain_is_admissible(state, grain),
                             result.minimizing_bipartition, result.phi))
    return rows


def phi_max(state: StateVector, measure: str = 'von-neumann') -> PhiResult:
    """Largest grain Phi over admissible grains; 0 for a single subsystem."""
    _check_state(state)
    if state.layout.n_subsystems < 2:
        return PhiResult(0.0, None, None, measure)

    best = None
    for row in phi_by_grain(state, measure):
        if not row.admissible:
            continue
        if best is None or row.phi > best.phi + TIE_TOL:
            best = row
    logger.debug("[PHI] phi_max=%.6g grain=%s cut=%s", best.phi, best.grain, best.bipartition)
    return PhiResult(best.phi, best.bipartition, best.grain, measure)


def build_phi_operator(spec: PhiBasisSpec, measure: str = 'von-neumann') -> HermitianOperator:
    """Operator diagonal in the given basis with eigenvalue phi_max per basis state."""
    values = np.array([phi_max(state, measure).phi for state in spec.basis_states])
    logger.info("[PHI] built Phi operator on %d basis states, %d distinct values",
                len(values), len(np.unique(np.round(values, 12))))
    return HermitianOperator.from_eigensystem(values, spec.matrix, spec.layout)


def bell_basis() -> PhiBasisSpec:
    layout = SubsystemLayout.qubits(2)
    r = 1 / np.sqrt(2)
    rows = [[r, 0, 0, r], [r, 0, 0, -r], [0, r, r, 0], [0, r, -r, 0]]
    return PhiBasisSpec(layout, tuple(StateVector(np.array(row, dtype=complex), layout) for row in rows))


def _qubit(amplitudes) -> StateVector:
    return StateVector.from_amplitudes(amplitudes, SubsystemLayout((2,)))


def _named_bell() -> StateVector:
    return StateVector.from_amplitudes([1, 0, 0, 1], SubsystemLayout.qubits(2))


def _named_ghz3() -> StateVector:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1
    return StateVector.from_amplitudes(amps, SubsystemLayout.qubits(3))


def _named_w3() -> StateVector:
    amps = np.zeros(8)
    amps[[1, 2, 4]] = 1
    return StateVector.from_amplitudes(amps, SubsystemLayout.qubits(3))


def _named_two_bell() -> StateVector:
    return tensor([_named_bell(), _named_bell()])


def _named_product3() -> StateVector:
    return tensor([_qubit([1, 1]), _qubit([1, 0]), _qubit([np.cos(0.3), np.sin(0.3) * 1j])])


def _named_photodiode() -> StateVector:
    return _qubit([1, 1])


NAMED_STATES = {
    'bell': _named_bell,
    'ghz3': _named_ghz3,
    'w3': _named_w3,
    'two-bell': _named_two_bell,
    'product3': _named_product3,
    'photodiode': _named_photodiode,
}


def named_state(name: str) -> StateVector:
    try:
        return NAMED_STATES[name]()
    except KeyError:
        raise ValueError(f"unknown state '{name}'; available: {', '.join(NAMED_STATES)}") from None
