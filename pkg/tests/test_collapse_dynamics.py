"""
Tests for the closed-form, SDE and GRW trajectory generators
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from quantum import (
    CslParams,
    HermitianOperator,
    StateVector,
    SubsystemLayout,
    closed_form_weights,
    fit_suppression_rate,
    sample_noise,
    survival_curve,
    trajectory_closed,
    trajectory_grw,
    trajectory_sde,
)
from quantum.collapse_dynamics import mean_jump_count, NoiseSample
from quantum.errors import NumericalAbortError
from quantum.hilbert import pauli_z


class TestClosedForm:

    def test_weight_ratio_matches_hand_calculation(self, two_branch):
        psi0, params = two_branch
        w = closed_form_weights(psi0, params, t=2.0, B=1.5)
        expected = np.sqrt(0.3 / 0.7) * np.exp((2.5 ** 2 - 1.5 ** 2) / 8.0)
        assert abs(w[0]) / abs(w[1]) == pytest.approx(expected, rel=1e-12)

    def test_noise_at_branch_mean_keeps_born_ratio(self, two_branch):
        psi0, params = two_branch
        # B halfway between 2*lam*t*a_0 and 2*lam*t*a_1 favours neither branch
        w = closed_form_weights(psi0, params, t=3.0, B=3.0)
        assert abs(w[0]) ** 2 / abs(w[1]) ** 2 == pytest.approx(0.3 / 0.7, rel=1e-12)

    def test_rejects_non_positive_time(self, two_branch):
        psi0, params = two_branch
        with pytest.raises(ValueError):
            closed_form_weights(psi0, params, t=0.0, B=0.0)

    def test_rejects_zero_strength(self, qubit):
        psi0 = StateVector.basis(qubit, 0)
        params = CslParams(0.0, HermitianOperator(pauli_z(), qubit))
        with pytest.raises(ValueError):
            closed_form_weights(psi0, params, t=1.0, B=0.0)

    def test_trajectory_weights_are_normalized(self, two_branch, rng):
        psi0, params = two_branch
        record = trajectory_closed(psi0, params, np.linspace(0.5, 10, 20), rng)
        assert_allclose(record.branch_weights.sum(axis=1), 1.0, atol=1e-12)
        assert record.n_times == 20
        assert record.final_state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_members_keep_exact_ratio(self, rng):
        layout = SubsystemLayout((3,))
        psi0 = StateVector.from_amplitudes([1.0, 2.0, 1.0], layout)
        params = CslParams(1.0, HermitianOperator.diagonal([1.0, 1.0, 0.0], layout))
        for _ in range(10):
            record = trajectory_closed(psi0, params, [0.5, 1.0, 5.0, 20.0], rng)
            # eigenvectors ordered a = 0, 1, 1: the two a = 1 members started at 1 and 4
            assert_allclose(record.branch_weights[:, 2] / record.branch_weights[:, 1], 4.0, rtol=1e-12)

    def test_eigenstate_is_a_fixed_point(self, qubit, rng):
        psi0 = StateVector.basis(qubit, 1)
        params = CslParams(2.0, HermitianOperator.diagonal([0.0, 1.0], qubit))
        record = trajectory_closed(psi0, params, [1.0, 2.0, 3.0], rng)
        assert_array_equal(record.class_weights, [[0.0, 1.0]] * 3)
        assert record.outcome == 1
        assert record.noise_class == 1
        assert record.collapsed

    def test_noise_path_starts_at_zero(self, two_branch, rng):
        psi0, params = two_branch
        record = trajectory_closed(psi0, params, [1.0, 2.0], rng)
        path = record.noise_sample()
        assert isinstance(path, NoiseSample)
        assert path.times[0] == 0.0 and path.values[0] == 0.0
        assert len(path.times) == 3

    def test_grid_must_increase(self, two_branch, rng):
        psi0, params = two_branch
        with pytest.raises(ValueError):
            trajectory_closed(psi0, params, [1.0, 1.0], rng)
        with pytest.raises(ValueError):
            trajectory_closed(psi0, params, [0.0, 1.0], rng)


def test_sample_noise_mixture(two_branch):
    psi0, params = two_branch
    rng = np.random.default_rng(99)
    t = 2.0
    draws = [sample_noise(psi0, params, t, rng) for _ in range(20000)]
    frequency = np.mean([d.noise_class == 0 for d in draws])
    assert frequency == pytest.approx(0.3, abs=0.02)
    # mixture mean: sum_k p_k * 2 lam t a_k
    assert np.mean([d.value for d in draws]) == pytest.approx(2 * t * 0.7, abs=0.08)
    spread = np.std([d.value for d in draws if d.noise_class == 1])
    assert spread == pytest.approx(np.sqrt(t), rel=0.05)


def test_sample_noise_single_eigenstate(qubit, two_branch):
    _, params = two_branch
    psi0 = StateVector.basis(qubit, 1)
    rng = np.random.default_rng(4242)
    t, n = 2.0, 10000
    draws = [sample_noise(psi0, params, t, rng) for _ in range(n)]
    assert all(d.noise_class == 1 for d in draws)
    mean = np.mean([d.value for d in draws])
    assert abs(mean - 2 * params.lam * t * 1.0) < 3 * np.sqrt(params.lam * t / n)


def test_sample_noise_concentrates_at_zero_for_short_times(two_branch):
    psi0, params = two_branch
    rng = np.random.default_rng(5)
    values = [sample_noise(psi0, params, 1e-12, rng).value for _ in range(1000)]
    assert np.max(np.abs(values)) < 1e-5
    with pytest.raises(ValueError):
        sample_noise(psi0, params, 0.0, rng)


def test_loser_suppression_rate():
    layout = SubsystemLayout((2,))
    psi0 = StateVector.from_amplitudes([1.0, 1.0], layout)
    params = CslParams(1.0, HermitianOperator.diagonal([-0.5, 0.5], layout))
    rng = np.random.default_rng(2024)
    times = np.arange(1.0, 11.0)
    records = [trajectory_closed(psi0, params, times, rng) for _ in range(2000)]
    slope = fit_suppression_rate(records, 0, 1)
    # expected slope -lam * (delta a)^2
    assert slope == pytest.approx(-1.0, rel=0.05)


class TestSde:

    def test_norm_preserved(self, two_branch, rng):
        psi0, params = two_branch
        h = HermitianOperator(0.3 * np.array([[0, 1], [1, 0]], dtype=complex), psi0.layout)
        record = trajectory_sde(psi0, h, params, dt=0.01, n_steps=500, rng=rng)
        assert record.final_state.norm() == pytest.approx(1.0, abs=1e-12)
        assert_allclose(record.branch_weights.sum(axis=1), 1.0, atol=1e-12)
        assert record.times[0] == 0.0
        assert record.times[-1] == pytest.approx(5.0)

    def test_record_every_keeps_last_step(self, two_branch, rng):
        psi0, params = two_branch
        record = trajectory_sde(psi0, None, params, dt=0.01, n_steps=105, rng=rng, record_every=10)
        assert record.n_times == 12
        assert record.times[-1] == pytest.approx(1.05)

    def test_euler_error_is_first_order(self, qubit):
        psi0 = StateVector.from_amplitudes([1.0, 1.0], qubit)
        params = CslParams(0.0, HermitianOperator(pauli_z(), qubit))
        h = HermitianOperator.diagonal([0.0, 2.0], qubit)
        errors = []
        for dt, steps in ((0.01, 100), (0.005, 200)):
            record = trajectory_sde(psi0, h, params, dt, steps, np.random.default_rng(0))
            errors.append(abs(record.branch_weights[-1, 1] - 0.5))
        assert errors[0] / errors[1] == pytest.approx(2.0, abs=0.1)

    def test_large_step_warns(self, two_branch, rng, caplog):
        psi0, params = two_branch
        h = HermitianOperator(10 * np.array([[0, 1], [1, 0]], dtype=complex), psi0.layout)
        with caplog.at_level('WARNING'):
            record = trajectory_sde(psi0, h, params, dt=0.05, n_steps=5, rng=rng)
        assert record.warnings
        assert 'exceeds' in caplog.text

    def test_overflow_aborts_with_step(self, qubit, rng):
        psi0 = StateVector.from_amplitudes([1.0, 1.0], qubit)
        params = CslParams(1e308, HermitianOperator(pauli_z(), qubit))
        with pytest.raises(NumericalAbortError) as excinfo:
            trajectory_sde(psi0, None, params, dt=10.0, n_steps=3, rng=rng, trajectory_id=7)
        assert excinfo.value.step == 1
        assert excinfo.value.trajectory_id == 7
        assert 'trajectory 7' in str(excinfo.value)

    def test_bad_arguments(self, two_branch, rng):
        psi0, params = two_branch
        with pytest.raises(ValueError):
            trajectory_sde(psi0, None, params, dt=0.0, n_steps=10, rng=rng)
        with pytest.raises(ValueError):
            trajectory_sde(psi0, None, params, dt=0.1, n_steps=0, rng=rng)


def _zeno_records(ratio, dt, steps, n, record_every, seed):
    from quantum import build_zeno_scenario
    scenario = build_zeno_scenario(omega=1.0, ratio=ratio)
    rng = np.random.default_rng(seed)
    return [trajectory_sde(scenario.initial_state, scenario.hamiltonian, scenario.params, dt, steps,
                           rng, record_every=record_every) for _ in range(n)]


def test_zeno_strong_collapse_pins_state():
    records = _zeno_records(ratio=100.0, dt=0.002, steps=5000, n=50, record_every=50, seed=5)
    # sigma_z eigenvectors ascend, so |0> is branch 1
    times, survival = survival_curve(records, 1)
    assert times[-1] == pytest.approx(10.0)
    assert survival[-1] > 0.85


@pytest.mark.slow
def test_zeno_strong_collapse_pins_state_full_ensemble():
    records = _zeno_records(ratio=100.0, dt=0.002, steps=5000, n=2000, record_every=50, seed=7)
    _, survival = survival_curve(records, 1)
    assert survival[-1] > 0.95


def test_zeno_weak_collapse_oscillates():
    records = _zeno_records(ratio=0.01, dt=0.01, steps=800, n=20, record_every=10, seed=6)
    _, survival = survival_curve(records, 1)
    assert survival.min() < 0.5


class TestGrw:

    def test_zero_rate_is_unitary(self, two_branch, rng):
        psi0, params = two_branch
        record = trajectory_grw(psi0, None, params.collapse_op, 0.0, 0.1, t_final=5.0, dt=0.5, rng=rng)
        assert record.jump_times == ()
        assert_allclose(record.branch_weights, [[0.3, 0.7]] * 11, atol=1e-12)
        assert np.all(np.isnan(record.noise))

    def test_mean_jump_count(self, two_branch):
        psi0, params = two_branch
        rng = np.random.default_rng(17)
        records = [trajectory_grw(psi0, None, params.collapse_op, 2.0, 0.5, t_final=5.0, dt=1.0, rng=rng)
                   for _ in range(500)]
        assert mean_jump_count(records) == pytest.approx(10.0, abs=0.6)
        for record in records[:20]:
            assert all(0 < t <= 5.0 for t in record.jump_times)

    def test_narrow_smearing_collapses_after_a_jump(self, two_branch, rng):
        psi0, params = two_branch
        record = trajectory_grw(psi0, None, params.collapse_op, 1.0, 0.05, t_final=30.0, dt=1.0, rng=rng)
        assert record.jump_times
        assert record.collapsed
        assert record.noise[-1] == pytest.approx(float(record.outcome), abs=0.5)

    def test_rejects_bad_smearing(self, two_branch, rng):
        psi0, params = two_branch
        with pytest.raises(ValueError):
            trajectory_grw(psi0, None, params.collapse_op, 1.0, 0.0, t_final=1.0, dt=0.1, rng=rng)


def test_sde_without_collapse_follows_unitary_evolution(qubit):
    from quantum import evolve_unitary
    psi0 = StateVector.basis(qubit, 0)
    h = HermitianOperator(0.25 * np.array([[0, 1], [1, 0]], dtype=complex), qubit)
    params = CslParams(0.0, HermitianOperator(pauli_z(), qubit))
    record = trajectory_sde(psi0, h, params, dt=0.001, n_steps=4000, rng=np.random.default_rng(1))
    exact = evolve_unitary(psi0, h, 4.0)
    # sigma_z eigenvectors ascend, so branch 1 is |0>
    assert record.branch_weights[-1, 1] == pytest.approx(exact.probabilities()[0], abs=5e-3)
