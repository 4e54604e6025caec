# quantum/hilbert.py
"""
Dense linear algebra over small tensor-product Hilbert spaces.
States, Hermitian operators, spectra and reduced density matrices.
All value types are immutable once built and safe to share between workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

from config import Config
from .errors import (
    DimensionMismatchError,
    InvalidGrainError,
    InvalidStateError,
    NotHermitianError,
)

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
DEGENERACY_FLOOR = 1e-12


def _frozen(array, dtype=complex):
    """Copy an array and mark the copy read-only."""
    arr = np.array(array, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def pauli_x() -> np.ndarray:
    """Return the Pauli-X matrix."""
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def pauli_z() -> np.ndarray:
    """Return the Pauli-Z matrix."""
    return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def number_operator(dim: int = 2) -> np.ndarray:
    """Return diag(0, 1, ..., dim - 1)."""
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered local dimensions of a composite system."""

    dims: tuple
    labels: tuple | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InvalidStateError("a layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise InvalidStateError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, 'dims', dims)

        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != len(dims):
                raise InvalidStateError(
                    f"{len(labels)} labels given for {len(dims)} subsystems"
                )
            object.__setattr__(self, 'labels', labels)

    @classmethod
    def qubits(cls, n: int, labels: Sequence[str] | None = None) -> SubsystemLayout:
        return cls(tuple([2] * n), tuple(labels) if labels is not None else None)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def concat(self, other: SubsystemLayout) -> SubsystemLayout:
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return SubsystemLayout(self.dims + other.dims, labels)

    def subset(self, indices: Iterable[int]) -> SubsystemLayout:
        indices = list(indices)
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in indices)
        return SubsystemLayout(tuple(self.dims[i] for i in indices), labels)

    def block_dim(self, indices: Iterable[int]) -> int:
        return int(np.prod([self.dims[i] for i in indices]))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector over a subsystem layout."""

    amplitudes: np.ndarray
    layout: SubsystemLayout
    normalized: bool = True

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.shape[0] != self.layout.total_dim:
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for a layout of dimension {self.layout.total_dim}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("state contains non-finite amplitudes")
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise InvalidStateError(
                f"state flagged normalized has norm {np.linalg.norm(amps):.15g}"
            )
        object.__setattr__(self, 'amplitudes', amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, layout: SubsystemLayout) -> StateVector:
        """Build a normalized state from unnormalized amplitudes."""
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise InvalidStateError("cannot normalize a zero or non-finite vector")
        return cls(amps / norm, layout)

    @classmethod
    def basis(cls, layout: SubsystemLayout, index: int) -> StateVector:
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, layout)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: StateVector) -> complex:
        """Return <self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError("inner product of states with different dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def apply(self, matrix: np.ndarray) -> StateVector:
        """Apply a norm-preserving matrix and renormalize away rounding."""
        matrix = np.asarray(matrix)
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"matrix of shape {matrix.shape} applied to a state of dimension {self.dim}"
            )
        return StateVector.from_amplitudes(matrix @ self.amplitudes, self.layout)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense self-adjoint matrix, optionally carrying a designated eigenbasis."""

    matrix: np.ndarray
    layout: SubsystemLayout
    eigenbasis: tuple | None = None

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        dim = self.layout.total_dim
        if matrix.shape != (dim, dim):
            raise DimensionMismatchError(
                f"operator of shape {matrix.shape} on a layout of dimension {dim}"
            )
        residual = hermiticity_residual(matrix)
        if residual > HERMITIAN_TOL:
            raise NotHermitianError(f"operator is not Hermitian (residual {residual:.3e})")
        object.__setattr__(self, 'matrix', matrix)

        if self.eigenbasis is not None:
            values, vectors = self.eigenbasis
            values = _frozen(values, dtype=float)
            vectors = _frozen(vectors)
            if values.shape != (dim,) or vectors.shape != (dim, dim):
                raise DimensionMismatchError("designated eigenbasis does not match the operator")
            object.__setattr__(self, 'eigenbasis', (values, vectors))

    @classmethod
    def from_eigensystem(cls, values, vectors, layout: SubsystemLayout) -> HermitianOperator:
        """Assemble sum_k values[k] |v_k><v_k| and keep the basis for eig()."""
        values = np.asarray(values, dtype=float)
        vectors = np.asarray(vectors, dtype=complex)
        matrix = (vectors * values) @ vectors.conj().T
        matrix = 0.5 * (matrix + matrix.conj().T)
        return cls(matrix, layout, eigenbasis=(values, vectors))

    @classmethod
    def diagonal(cls, values, layout: SubsystemLayout) -> HermitianOperator:
        values = np.asarray(values, dtype=float)
        return cls.from_eigensystem(values, np.eye(len(values), dtype=complex), layout)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def spectral_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues, orthonormal eigenvector columns, degeneracy classes."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_classes: tuple

    def __post_init__(self):
        object.__setattr__(self, 'eigenvalues', _frozen(self.eigenvalues, dtype=float))
        object.__setattr__(self, 'eigenvectors', _frozen(self.eigenvectors))
        classes = tuple(tuple(int(i) for i in group) for group in self.degeneracy_classes)
        object.__setattr__(self, 'degeneracy_classes', classes)
        class_index = np.empty(len(self.eigenvalues), dtype=int)
        for c, group in enumerate(classes):
            class_index[list(group)] = c
        class_index.setflags(write=False)
        object.__setattr__(self, '_class_index', class_index)

    @property
    def n_classes(self) -> int:
        return len(self.degeneracy_classes)

    @property
    def class_index(self) -> np.ndarray:
        """Class number of every eigenvector."""
        return self._class_index

    @property
    def class_values(self) -> np.ndarray:
        return np.array([self.eigenvalues[group[0]] for group in self.degeneracy_classes])

    def components(self, state: StateVector) -> np.ndarray:
        """Return c_k = <a_k|psi>."""
        if state.dim != len(self.eigenvalues):
            raise DimensionMismatchError("state and spectrum dimensions differ")
        return self.eigenvectors.conj().T @ state.amplitudes

    def aggregate(self, branch_weights: np.ndarray) -> np.ndarray:
        """Sum per-eigenvector weights into per-class weights (last axis)."""
        branch_weights = np.asarray(branch_weights, dtype=float)
        out = np.zeros(branch_weights.shape[:-1] + (self.n_classes,))
        for c, group in enumerate(self.degeneracy_classes):
            out[..., c] = branch_weights[..., list(group)].sum(axis=-1)
        return out

    def class_weights(self, state: StateVector) -> np.ndarray:
        return self.aggregate(np.abs(self.components(state)) ** 2)

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T

    def reconstruction_error(self, op: HermitianOperator) -> float:
        return float(np.max(np.abs(self.reconstruct() - op.matrix)))

    def unitarity_error(self) -> float:
        return unitarity_residual(self.eigenvectors)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite, unit-trace Hermitian matrix over a layout."""

    matrix: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        dim = self.layout.total_dim
        if matrix.shape != (dim, dim):
            raise DimensionMismatchError(
                f"density matrix of shape {matrix.shape} on a layout of dimension {dim}"
            )
        if hermiticity_residual(matrix) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        trace = np.trace(matrix).real
        if abs(trace - 1.0) > NORM_TOL:
            raise InvalidStateError(f"density matrix has trace {trace:.15g}")
        if np.min(linalg.eigvalsh(matrix)) < -PSD_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_state(cls, state: StateVector) -> DensityMatrix:
        psi = state.amplitudes
        return cls(np.outer(psi, psi.conj()), state.layout)

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def hermiticity_residual(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return float('inf')
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def unitarity_residual(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[1]))))


def tensor(factors: Sequence[StateVector]) -> StateVector:
    """Kronecker product of normalized factors, in factor order."""
    factors = list(factors)
    if not factors:
        raise InvalidStateError("tensor needs at least one factor")
    for factor in factors:
        if not factor.normalized:
            raise InvalidStateError("tensor factors must be normalized")
    amplitudes = reduce(np.kron, (f.amplitudes for f in factors))
    layout = reduce(lambda a, b: a.concat(b), (f.layout for f in factors))
    return StateVector.from_amplitudes(amplitudes, layout)


def _check_keep(layout: SubsystemLayout, keep) -> list:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidGrainError("partial_trace needs at least one kept subsystem")
    if keep[0] < 0 or keep[-1] >= layout.n_subsystems:
        raise InvalidGrainError(f"subsystem indices {keep} outside a {layout.n_subsystems}-part layout")
    if len(keep) == layout.n_subsystems:
        raise InvalidGrainError("partial_trace must trace out at least one subsystem")
    return keep


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix over the kept subsystems (ascending index order)."""
    layout = state.layout
    keep = _check_keep(layout, keep)
    n = layout.n_subsystems
    rest = [i for i in range(n) if i not in keep]
    d_keep = layout.block_dim(keep)

    if isinstance(state, StateVector):
        psi = state.as_tensor().transpose(keep + rest).reshape(d_keep, -1)
        rho = psi @ psi.conj().T
    elif isinstance(state, DensityMatrix):
        tensor_rho = state.matrix.reshape(layout.dims + layout.dims)
        row_axes = list(range(n))
        col_axes = [i if i in rest else n + i for i in range(n)]
        out_axes = keep + [n + i for i in keep]
        rho = np.einsum(tensor_rho, row_axes + col_axes, out_axes).reshape(d_keep, d_keep)
    else:
        raise TypeError(f"partial_trace expects a StateVector or DensityMatrix, got {type(state).__name__}")

    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, layout.subset(keep))


def von_neumann_entropy(rho) -> float:
    """Entropy -Tr rho ln rho in nats."""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    p = rho.eigenvalues() if isinstance(rho, DensityMatrix) else linalg.eigvalsh(matrix)
    p = p[p > 1e-15]
    return max(0.0, float(-np.sum(p * np.log(p))))


def mutual_information(state: StateVector, block_a, block_b) -> float:
    """Quantum mutual information S(A) + S(B) - S(AB) of a pure state."""
    block_a = sorted(block_a)
    block_b = sorted(block_b)
    joint = sorted(set(block_a) | set(block_b))
    s_a = von_neumann_entropy(partial_trace(state, block_a))
    s_b = von_neumann_entropy(partial_trace(state, block_b))
    if len(joint) == state.layout.n_subsystems:
        s_ab = 0.0
    else:
        s_ab = von_neumann_entropy(partial_trace(state, joint))
    return s_a + s_b - s_ab


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    vectors = np.array(vectors, dtype=complex, copy=True)
    pivots = np.argmax(np.abs(vectors), axis=0)
    for j, k in enumerate(pivots):
        pivot = vectors[k, j]
        if pivot != 0:
            vectors[:, j] *= abs(pivot) / pivot
    return vectors


def _group_degenerate(values: np.ndarray, tol: float) -> tuple:
    classes = []
    current = [0]
    for i in range(1, len(values)):
        if values[i] - values[current[0]] <= tol:
            current.append(i)
        else:
            classes.append(tuple(current))
            current = [i]
    classes.append(tuple(current))
    return tuple(classes)


def eig(op, degeneracy_tol: float | None = None) -> Spectrum:
    """
    Eigen-decomposition of a Hermitian operator.

    Eigenvalues come back ascending. An operator built with a designated
    eigenbasis returns that basis (stable-sorted) instead of an arbitrary
    rotation inside degenerate subspaces. The default degeneracy tolerance is
    CSL_DEGENERACY_RTOL times the spectral range.
    """
    if not isinstance(op, HermitianOperator):
        matrix = np.asarray(op)
        if hermiticity_residual(matrix) > HERMITIAN_TOL:
            raise NotHermitianError("eig needs a Hermitian matrix")
        op = HermitianOperator(matrix, SubsystemLayout((matrix.shape[0],)))

    if op.eigenbasis is not None:
        values, vectors = np.array(op.eigenbasis[0]), np.array(op.eigenbasis[1])
    else:
        values, vectors = linalg.eigh(op.matrix)

    order = np.argsort(values, kind='stable')
    values = values[order]
    vectors = _fix_phases(vectors[:, order])

    if degeneracy_tol is None:
        # floor keeps rounding noise of an exactly degenerate spectrum in one class
        floor = DEGENERACY_FLOOR * max(1.0, float(np.max(np.abs(values))))
        degeneracy_tol = max(Config.CSL_DEGENERACY_RTOL * float(values[-1] - values[0]), floor)
    classes = _group_degenerate(values, degeneracy_tol)
    logger.debug("[HILBERT] eig: dim=%d classes=%d tol=%.3e", len(values), len(classes), degeneracy_tol)
    return Spectrum(values, vectors, classes)


def expectation(op: HermitianOperator, state: StateVector) -> float:
    """Return <psi|A|psi> for a normalized state."""
    if op.dim != state.dim:
        raise DimensionMismatchError(
            f"operator of dimension {op.dim} with a state of dimension {state.dim}"
        )
    if not state.normalized:
        raise InvalidStateError("expectation needs a normalized state")
    return float(np.vdot(state.amplitudes, op.matrix @ state.amplitudes).real)


def embed_operator(local: np.ndarray, targets: Sequence[int], layout: SubsystemLayout) -> np.ndarray:
    """Lift an operator acting on `targets` (in that order) to the whole register."""
    targets = [int(t) for t in targets]
    n = layout.n_subsystems
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise InvalidGrainError(f"bad target subsystems {targets}")
    local = np.asarray(local, dtype=complex)
    d_t = layout.block_dim(targets)
    if local.shape != (d_t, d_t):
        raise DimensionMismatchError(f"local operator of shape {local.shape} for targets of dimension {d_t}")

    rest = [i for i in range(n) if i not in targets]
    order = targets + rest
    full = np.kron(local, np.eye(layout.block_dim(rest), dtype=complex)) if rest else local
    shape = [layout.dims[i] for i in order]
    inverse = list(np.argsort(order))
    full = full.reshape(shape + shape).transpose(inverse + [n + i for i in inverse])
    return full.reshape(layout.total_dim, layout.total_dim)


def unitary_propagator(H: HermitianOperator, t: float) -> np.ndarray:
    """exp(-iHt) through the eigen-decomposition of H."""
    energies, vectors = linalg.eigh(H.matrix)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def evolve_unitary(state: StateVector, H: HermitianOperator, t: float) -> StateVector:
    return state.apply(unitary_propagator(H, t))
