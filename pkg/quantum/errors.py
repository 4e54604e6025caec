# quantum/errors.py
"""
Exception types shared by the simulation layer and the CLI.
"""


class SimulationError(Exception):
    """Base class for every failure raised by the simulator."""


class DimensionMismatchError(SimulationError, ValueError):
    """Operands live on incompatible Hilbert spaces."""


class NotHermitianError(SimulationError, ValueError):
    """A matrix that must be self-adjoint is not."""


class InvalidStateError(SimulationError, ValueError):
    """A state vector or density matrix violates its invariants."""


class InvalidGrainError(SimulationError, ValueError):
    """A grain or bipartition does not cover the layout it is used with."""


class IncompleteBasisError(SimulationError, ValueError):
    """A basis is not orthonormal or does not span the space."""


class NumericalAbortError(SimulationError):
    """A trajectory produced non-finite numbers and was stopped."""

    def __init__(self, message, trajectory_id=None, step=None):
        super().__init__(message)
        self.trajectory_id = trajectory_id
        self.step = step

    def __str__(self):
        base = super().__str__()
        if self.trajectory_id is not None:
            base = f"trajectory {self.trajectory_id}: {base}"
        if self.step is not None:
            base = f"{base} (step {self.step})"
        return base


class ConfigError(Exception):
    """An experiment config failed to parse or validate."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line

    def __str__(self):
        parts = []
        if self.line is not None:
            parts.append(f"line {self.line}")
        if self.key:
            parts.append(f"key '{self.key}'")
        prefix = ", ".join(parts)
        message = super().__str__()
        return f"{prefix}: {message}" if prefix else message
