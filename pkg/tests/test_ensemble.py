"""
Tests for seeded ensembles and their outcome statistics
"""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from quantum import TrajectorySpec, derive_seed, run_ensemble, simulate_ensemble
from quantum.ensemble import EnsembleService, born_chi_square, compare_outcomes


def _closed_spec(two_branch, t_final=20.0):
    psi0, params = two_branch
    return TrajectorySpec('csl-closed', psi0, params, time_grid=np.linspace(t_final / 10, t_final, 10))


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(42, 0) == derive_seed(42, 0)
    seeds = {derive_seed(42, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(42, 1) != derive_seed(43, 1)
    with pytest.raises(ValueError):
        derive_seed(-1, 0)


def test_results_do_not_depend_on_worker_count(two_branch):
    spec = _closed_spec(two_branch)
    serial = simulate_ensemble(spec, 64, master_seed=9, workers=1)
    pooled = simulate_ensemble(spec, 64, master_seed=9, workers=4)
    assert [r.trajectory_id for r in pooled] == list(range(64))
    for a, b in zip(serial, pooled):
        assert a.seed == b.seed
        assert a.outcome == b.outcome
        assert_array_equal(a.branch_weights, b.branch_weights)
        assert_array_equal(a.noise, b.noise)


def test_trajectory_is_reproducible_from_its_own_seed(two_branch):
    spec = _closed_spec(two_branch)
    records = simulate_ensemble(spec, 10, master_seed=5)
    again = EnsembleService().run_trajectory(spec, 7, master_seed=5)
    assert_array_equal(again.noise, records[7].noise)


def test_counts_and_born_match(two_branch):
    stats = run_ensemble(_closed_spec(two_branch), 2000, master_seed=1)
    assert sum(stats.counts) == 2000
    assert stats.born_probabilities == pytest.approx((0.3, 0.7))
    assert stats.empirical_probabilities[0] == pytest.approx(0.3, abs=0.04)
    assert stats.p_value > 1e-3
    assert stats.n_collapsed > 1900


@pytest.mark.slow
def test_born_rule_large_ensemble(two_branch):
    stats = run_ensemble(_closed_spec(two_branch), 10_000, master_seed=20240611, workers=4)
    assert stats.p_value > 1e-3
    assert stats.empirical_probabilities[0] == pytest.approx(0.3, abs=0.015)


def _sde_spec(two_branch, dt, steps):
    psi0, params = two_branch
    return TrajectorySpec('csl-sde', psi0, params, dt=dt, n_steps=steps, record_every=steps)


def test_sde_agrees_with_closed_form(two_branch):
    closed = simulate_ensemble(_closed_spec(two_branch), 300, master_seed=2)
    sde = simulate_ensemble(_sde_spec(two_branch, dt=0.02, steps=1000), 300, master_seed=3)
    _, p_value = compare_outcomes(closed, sde)
    assert p_value > 1e-3


@pytest.mark.slow
def test_sde_agrees_with_closed_form_large_ensemble(two_branch):
    closed = simulate_ensemble(_closed_spec(two_branch), 5000, master_seed=2, workers=4)
    sde = simulate_ensemble(_sde_spec(two_branch, dt=0.01, steps=2000), 5000, master_seed=3, workers=4)
    _, p_value = compare_outcomes(closed, sde)
    assert p_value > 0.01


def test_grw_reproduces_born_weights(two_branch):
    psi0, params = two_branch
    spec = TrajectorySpec('grw', psi0, params, dt=1.0, t_final=20.0, grw_rate=1.0, grw_smearing=0.05)
    stats = run_ensemble(spec, 1000, master_seed=4)
    assert stats.p_value > 1e-3
    assert stats.extras['mean_jumps'] == pytest.approx(20.0, abs=1.0)


def test_chi_square_edge_cases():
    # a count in a class of zero Born weight is impossible
    assert born_chi_square([3, 1], [1.0, 0.0]) == (float('inf'), 0.0)
    # one class with weight: nothing to test
    assert born_chi_square([10, 0], [1.0, 0.0]) == (0.0, 1.0)
    statistic, p_value = born_chi_square([30, 70], [0.3, 0.7])
    assert statistic == pytest.approx(0.0)
    assert p_value == pytest.approx(1.0)


def test_summary_carries_run_metadata(two_branch):
    stats = run_ensemble(_closed_spec(two_branch), 20, master_seed=8)
    summary = stats.to_summary()
    assert summary['master_seed'] == 8
    assert summary['dynamics'] == 'csl-closed'
    assert summary['class_values'] == [0.0, 1.0]


def test_spec_validation(two_branch):
    psi0, params = two_branch
    with pytest.raises(ValueError):
        TrajectorySpec('lindblad', psi0, params)
    with pytest.raises(ValueError):
        TrajectorySpec('csl-closed', psi0, params)
    with pytest.raises(ValueError):
        TrajectorySpec('csl-sde', psi0, params, dt=0.1)
    with pytest.raises(ValueError):
        simulate_ensemble(_closed_spec(two_branch), 0, master_seed=1)


@pytest.mark.slow
def test_grw_born_weights_large_ensemble(two_branch):
    psi0, params = two_branch
    spec = TrajectorySpec('grw', psi0, params, dt=1.0, t_final=20.0, grw_rate=1.0, grw_smearing=0.05)
    stats = run_ensemble(spec, 10_000, master_seed=40, workers=4)
    assert stats.empirical_probabilities[0] == pytest.approx(0.3, abs=0.02)
