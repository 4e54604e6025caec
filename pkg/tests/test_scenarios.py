"""
Tests for the measurement, environment, ready-state and Zeno scenarios
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quantum import (
    StateVector,
    SubsystemLayout,
    TrajectorySpec,
    build_environment_scenario,
    build_measurement_scenario,
    build_ready_state_variants,
    build_two_branch_scenario,
    build_zeno_scenario,
    couple_environment,
    eig,
    scenario_catalog,
    simulate_ensemble,
    trajectory_closed,
)
from quantum.hilbert import unitarity_residual
from quantum.scenarios import environment_overlap

ALPHA, BETA = 0.6, 0.8j


class TestMeasurement:

    def test_apparatus_tracks_particle(self):
        scenario = build_measurement_scenario(ALPHA, BETA)
        expected = np.zeros(4, dtype=complex)
        expected[0b00], expected[0b11] = ALPHA, BETA
        assert_allclose(scenario.tracked_state.amplitudes, expected, atol=1e-15)

    def test_observer_tracks_apparatus(self):
        scenario = build_measurement_scenario(ALPHA, BETA, with_observer=True)
        expected = np.zeros(8, dtype=complex)
        expected[0b000], expected[0b111] = ALPHA, BETA
        assert_allclose(scenario.tracked_state.amplitudes, expected, atol=1e-15)
        assert scenario.layout.labels == ('p', 'M', 'O')

    def test_tracking_map_is_linear(self):
        plus = build_measurement_scenario(1.0, 0.0, with_observer=True)
        minus = build_measurement_scenario(0.0, 1.0, with_observer=True)
        both = build_measurement_scenario(ALPHA, BETA, with_observer=True)
        combined = ALPHA * plus.tracked_state.amplitudes + BETA * minus.tracked_state.amplitudes
        assert_allclose(both.tracked_state.amplitudes, combined, atol=1e-15)

    def test_tracking_map_is_unitary(self):
        scenario = build_measurement_scenario(with_observer=True)
        assert unitarity_residual(scenario.tracking_unitary) < 1e-12

    def test_pointer_collapse_operator(self):
        scenario = build_measurement_scenario(ALPHA, BETA, collapse='pointer')
        spectrum = eig(scenario.collapse_op)
        assert_allclose(spectrum.class_values, [-1.0, 1.0])
        assert_allclose(spectrum.class_weights(scenario.tracked_state), [0.64, 0.36], atol=1e-12)

    def test_amplitudes_must_be_normalized(self):
        with pytest.raises(ValueError):
            build_measurement_scenario(1.0, 1.0)
        with pytest.raises(ValueError):
            build_measurement_scenario(collapse='energy')


def test_degenerate_phi_cannot_select_a_branch():
    scenario = build_measurement_scenario(ALPHA, BETA, with_observer=True, lam=5.0)
    assert eig(scenario.collapse_op).n_classes == 1
    rng = np.random.default_rng(3)
    record = trajectory_closed(scenario.tracked_state, scenario.params, [1.0, 10.0, 100.0], rng)
    weights = np.abs(eig(scenario.collapse_op).components(record.final_state)) ** 2
    nonzero = np.sort(weights[weights > 1e-12])
    assert_allclose(nonzero, [0.36, 0.64], atol=1e-12)


def test_symmetric_phi_puts_both_branches_in_one_nonzero_class():
    scenario = scenario_catalog.build('degeneracy', alpha=ALPHA, beta=BETA, lam=5.0)
    spectrum = eig(scenario.collapse_op)
    assert_allclose(spectrum.class_values, [0.0, np.log(2)], atol=1e-12)
    assert_allclose(spectrum.class_weights(scenario.tracked_state), [0.0, 1.0], atol=1e-12)

    rng = np.random.default_rng(21)
    record = trajectory_closed(scenario.tracked_state, scenario.params, [1.0, 10.0, 100.0], rng)
    plus, minus = scenario.branch_states
    assert abs(plus.inner(record.final_state)) ** 2 == pytest.approx(0.36, abs=1e-12)
    assert abs(minus.inner(record.final_state)) ** 2 == pytest.approx(0.64, abs=1e-12)


class TestEnvironmentCoupling:

    def test_overlap_is_cos_power(self):
        state = build_measurement_scenario(ALPHA, BETA).tracked_state
        coupled = couple_environment(state, n_env=3, theta=0.4, effective=False)
        assert coupled.layout.dims == (2, 2, 2, 2, 2)
        assert coupled.norm() == pytest.approx(1.0, abs=1e-12)
        env = coupled.amplitudes.reshape(4, 8)
        e_plus = env[0b00] / ALPHA
        e_minus = env[0b11] / BETA
        assert abs(np.vdot(e_plus, e_minus)) == pytest.approx(np.cos(0.4) ** 3, abs=1e-12)

    def test_effective_qubit_carries_the_same_overlap(self):
        state = build_measurement_scenario(ALPHA, BETA).tracked_state
        coupled = couple_environment(state, n_env=30, theta=0.2)
        assert coupled.layout.dims == (2, 2, 2)
        env = coupled.amplitudes.reshape(4, 2)
        overlap = abs(np.vdot(env[0b00] / ALPHA, env[0b11] / BETA))
        assert overlap == pytest.approx(environment_overlap(30, 0.2), abs=1e-12)

    def test_zero_environment_is_identity(self):
        state = build_measurement_scenario(ALPHA, BETA).tracked_state
        assert couple_environment(state, 0, 0.3) is state


class TestEnvironmentScenario:

    def test_explicit_register_matches_coupling(self):
        scenario = build_environment_scenario(ALPHA, BETA, n_env=2, theta=0.5, effective=False)
        system = build_measurement_scenario(ALPHA, BETA, with_observer=True)
        coupled = couple_environment(system.tracked_state, n_env=2, theta=0.5, pointer=1, effective=False)
        assert_allclose(scenario.tracked_state.amplitudes, coupled.amplitudes, atol=1e-12)

    def test_tracked_state_lies_on_dressed_branches(self):
        scenario = build_environment_scenario(ALPHA, BETA, n_env=20)
        plus, minus = scenario.branch_states
        rebuilt = ALPHA * plus.amplitudes + BETA * minus.amplitudes
        assert_allclose(scenario.tracked_state.amplitudes, rebuilt, atol=1e-12)

    def test_phi_split_grows_with_distinguishability(self):
        near = build_environment_scenario(n_env=1, theta=0.1)
        far = build_environment_scenario(n_env=20, theta=np.pi / 4)
        assert np.ptp(eig(near.collapse_op).class_values) < np.ptp(eig(far.collapse_op).class_values)

    def test_zero_angle_leaves_branches_degenerate(self):
        scenario = build_environment_scenario(n_env=4, theta=0.0, effective=False)
        assert eig(scenario.collapse_op).n_classes == 1
        rng = np.random.default_rng(12)
        record = trajectory_closed(scenario.tracked_state, scenario.params, [5.0, 50.0], rng)
        plus, minus = scenario.branch_states
        assert abs(plus.inner(record.final_state)) ** 2 == pytest.approx(0.5, abs=1e-12)
        assert abs(minus.inner(record.final_state)) ** 2 == pytest.approx(0.5, abs=1e-12)

    def test_records_drive_collapse(self):
        scenario = build_environment_scenario(n_env=20, theta=np.pi / 4, lam=1.0)
        split = np.ptp(eig(scenario.collapse_op).class_values)
        # times at which lam * t * split^2 reaches 5, 15 and 20
        times = tuple(x / (scenario.params.lam * split ** 2) for x in (5.0, 15.0, 20.0))
        spec = TrajectorySpec('csl-closed', scenario.tracked_state, scenario.params, time_grid=times)
        records = simulate_ensemble(spec, 2000, master_seed=77)
        dominant_at_15 = np.array([r.class_weights[1].max() for r in records])
        assert np.mean(dominant_at_15 > 1 - 1e-6) >= 0.97
        assert np.mean([r.collapsed for r in records]) >= 0.95
        assert np.median([r.dominant_weight for r in records]) > 1 - 1e-6


class TestReadyStates:

    def test_pointer_tracking_observer(self):
        scenario = build_ready_state_variants('tracks_pointer', ALPHA, BETA)
        psi = scenario.tracked_state.amplitudes
        assert scenario.layout.dims == (2, 2, 4)
        assert abs(psi[0b0000]) ** 2 == pytest.approx(0.36)
        assert abs(psi[0b1101]) ** 2 == pytest.approx(0.64)

    def test_superposition_tracking_observer(self):
        scenario = build_ready_state_variants('tracks_superposition', ALPHA, BETA)
        assert abs(scenario.branch_states[0].inner(scenario.tracked_state)) == pytest.approx(1.0, abs=1e-12)

    def test_superposed_ready_state_splits_evenly(self):
        scenario = build_ready_state_variants('superposed_ready')
        spectrum = eig(scenario.collapse_op)
        weights = spectrum.class_weights(scenario.tracked_state)
        assert_allclose(np.sort(weights[weights > 1e-12]), [0.5, 0.5], atol=1e-12)
        r_branch, rs_branch = scenario.branch_states
        assert abs(r_branch.inner(scenario.tracked_state)) ** 2 == pytest.approx(0.5, abs=1e-12)
        assert abs(rs_branch.inner(scenario.tracked_state)) ** 2 == pytest.approx(0.5, abs=1e-12)

    @staticmethod
    def _superposed_ready_outcomes(n_trajectories, master_seed):
        scenario = build_ready_state_variants('superposed_ready')
        spectrum = eig(scenario.collapse_op)
        occupied = np.flatnonzero(spectrum.class_weights(scenario.tracked_state) > 1e-12)
        split = np.ptp(spectrum.class_values[occupied])
        t_final = 20.0 / (scenario.params.lam * split ** 2)
        spec = TrajectorySpec('csl-closed', scenario.tracked_state, scenario.params, time_grid=(t_final,))
        records = simulate_ensemble(spec, n_trajectories, master_seed=master_seed)
        outcomes = np.array([r.outcome for r in records])
        return [np.mean(outcomes == c) for c in occupied]

    def test_superposed_ready_ensemble_splits_evenly(self):
        assert_allclose(self._superposed_ready_outcomes(2000, 8), [0.5, 0.5], atol=0.04)

    @pytest.mark.slow
    def test_superposed_ready_ensemble_large(self):
        assert_allclose(self._superposed_ready_outcomes(10000, 9), [0.5, 0.5], atol=0.02)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            build_ready_state_variants('tracks_nothing')


def test_zeno_parameters():
    scenario = build_zeno_scenario(omega=2.0, ratio=100.0)
    assert scenario.params.lam == pytest.approx(50.0)
    assert scenario.hamiltonian.spectral_norm() == pytest.approx(0.5)
    assert scenario.initial_state.probabilities()[0] == 1.0


def test_two_branch_scenario():
    scenario = build_two_branch_scenario(p0=0.25, delta_a=2.0)
    assert_allclose(scenario.initial_state.probabilities(), [0.25, 0.75])
    assert_allclose(eig(scenario.collapse_op).class_values, [0.0, 2.0])


class TestCatalog:

    def test_names(self):
        assert scenario_catalog.names() == [
            'two-branch', 'measurement', 'measurement-observer', 'degeneracy',
            'environment', 'ready-state', 'zeno',
        ]

    def test_build_with_arguments(self):
        scenario = scenario_catalog.build('ready-state', mode='tracks_pointer')
        assert scenario.name == 'ready-tracks_pointer'

    def test_fixed_arguments_cannot_be_overridden(self):
        with pytest.raises(ValueError):
            scenario_catalog.build('measurement-observer', with_observer=False)
        with pytest.raises(ValueError):
            scenario_catalog.build('zeno', n_env=3)
        with pytest.raises(ValueError):
            scenario_catalog.get('double-slit')

    def test_layouts_are_consistent(self):
        for name in ('two-branch', 'measurement', 'degeneracy', 'zeno'):
            scenario = scenario_catalog.build(name)
            assert scenario.tracked_state.layout == scenario.layout
            assert isinstance(scenario.tracked_state, StateVector)
            assert scenario.collapse_op.layout == SubsystemLayout(scenario.layout.dims, scenario.layout.labels)
