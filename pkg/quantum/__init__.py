# quantum/__init__.py
"""
Simulation package initialization
Provides centralized access to the linear algebra, dynamics, Phi and scenario modules
"""

from .errors import (
    SimulationError,
    DimensionMismatchError,
    NotHermitianError,
    InvalidStateError,
    InvalidGrainError,
    IncompleteBasisError,
    NumericalAbortError,
    ConfigError,
)
from .hilbert import (
    SubsystemLayout,
    StateVector,
    HermitianOperator,
    Spectrum,
    DensityMatrix,
    tensor,
    partial_trace,
    eig,
    expectation,
    embed_operator,
    evolve_unitary,
    von_neumann_entropy,
    mutual_information,
)
from .collapse_dynamics import (
    CslParams,
    NoiseSample,
    TrajectoryRecord,
    closed_form_weights,
    sample_noise,
    trajectory_closed,
    trajectory_sde,
    trajectory_grw,
    fit_suppression_rate,
    survival_curve,
)
from .integrated_information import (
    Grain,
    Bipartition,
    PhiResult,
    PhiBasisSpec,
    enumerate_grains,
    enumerate_bipartitions,
    min_bipartition_entropy,
    phi_by_grain,
    phi_max,
    build_phi_operator,
    named_state,
)
from .scenarios import (
    ScenarioSpec,
    build_measurement_scenario,
    couple_environment,
    build_ready_state_variants,
    build_environment_scenario,
    build_zeno_scenario,
    build_two_branch_scenario,
    scenario_catalog,
)
from .ensemble import (
    TrajectorySpec,
    EnsembleStats,
    derive_seed,
    ensemble_service,
    simulate_ensemble,
    run_ensemble,
)

__all__ = [
    'SimulationError', 'DimensionMismatchError', 'NotHermitianError', 'InvalidStateError',
    'InvalidGrainError', 'IncompleteBasisError', 'NumericalAbortError', 'ConfigError',
    'SubsystemLayout', 'StateVector', 'HermitianOperator', 'Spectrum', 'DensityMatrix',
    'tensor', 'partial_trace', 'eig', 'expectation', 'embed_operator', 'evolve_unitary',
    'von_neumann_entropy', 'mutual_information',
    'CslParams', 'NoiseSample', 'TrajectoryRecord', 'closed_form_weights', 'sample_noise',
    'trajectory_closed', 'trajectory_sde', 'trajectory_grw', 'fit_suppression_rate', 'survival_curve',
    'Grain', 'Bipartition', 'PhiResult', 'PhiBasisSpec', 'enumerate_grains', 'enumerate_bipartitions',
    'min_bipartition_entropy', 'phi_by_grain', 'phi_max', 'build_phi_operator', 'named_state',
    'ScenarioSpec', 'build_measurement_scenario', 'couple_environment', 'build_ready_state_variants',
    'build_environment_scenario', 'build_zeno_scenario', 'build_two_branch_scenario', 'scenario_catalog',
    'TrajectorySpec', 'EnsembleStats', 'derive_seed', 'ensemble_service', 'simulate_ensemble',
    'run_ensemble',
]
