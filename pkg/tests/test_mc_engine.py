"""Tests for the Monte Carlo engine."""

import math

import numpy as np
import pytest

from thzsim.config import get_settings
from thzsim.models.channel import IciCoefficients
from thzsim.services.grid_service import build_grid
from thzsim.services.mc_engine import (
    average_sinr,
    draw_realization,
    instantaneous_sinr,
    outage,
    outage_curve,
    proportion_estimate,
    run_average_sinr,
    run_outage,
    semi_analytic_op_no_phn,
    simulate_sinr,
    sinr_from_h2,
)
from thzsim.services.misalignment import derive_beam, second_moment_hp
from thzsim.services.path_gain import grid_path_gains
from thzsim.services.random_streams import trial_stream


def db(value: float) -> float:
    return 10 ** (value / 10)


def test_deterministic_limit(make_config):
    config = make_config(beta=0.0, sigma_s=0.0, m=1e6, n_trials=2000)
    grid = build_grid(config)
    expected = (grid_path_gains(config, grid) * derive_beam(0.05, 0.1, 0.0).A0) ** 2 * 100.0

    samples = simulate_sinr(config, workers=1)

    np.testing.assert_allclose(samples.rho.mean(axis=0), expected, rtol=1e-2)


def test_no_phase_noise_means_no_interference(make_config):
    config = make_config(beta=0.0, n_trials=1000)
    grid = build_grid(config)
    rng = trial_stream(config.seed, 0)
    real = draw_realization(config, grid, rng)
    A = IciCoefficients.uniform(grid, 0.0)
    for k in grid.indices:
        assert instantaneous_sinr(real, k, A, config, grid) == pytest.approx(real.h2_of(k) * 100.0)


def test_realization_shares_misalignment(make_config):
    config = make_config()
    real = draw_realization(config, build_grid(config), trial_stream(1, 0))
    assert len(set(real.h_p)) == 1
    assert len(set(real.h_f_mag)) == config.K


def test_instantaneous_sinr_matches_batched_kernel(make_config):
    config = make_config(P_adj=10.0)
    grid = build_grid(config)
    real = draw_realization(config, grid, trial_stream(config.seed, 3))
    A = IciCoefficients.uniform(grid, 0.2)

    batched = sinr_from_h2(np.array([real.h2]), config, grid, A)[0]

    for pos, k in enumerate(grid.indices):
        assert instantaneous_sinr(real, k, A, config, grid) == pytest.approx(batched[pos], rel=1e-12)


def test_scaling_powers_and_noise_leaves_sinr_unchanged(make_config):
    config = make_config(P_adj=10.0, n_trials=3000)
    scaled = config.with_updates(P=tuple(p * 7.5 for p in config.P), P_adj=75.0, N_o=7.5)

    np.testing.assert_allclose(simulate_sinr(scaled).rho, simulate_sinr(config).rho, rtol=1e-12)


def test_results_do_not_depend_on_worker_count(make_config, monkeypatch):
    monkeypatch.setenv("THZSIM_BLOCK_SIZE", "256")
    get_settings.cache_clear()
    config = make_config(n_trials=3000)

    one = simulate_sinr(config, workers=1)
    four = simulate_sinr(config, workers=4)

    assert np.array_equal(one.rho, four.rho)


def test_edge_carrier_beats_its_neighbor(make_config):
    config = make_config(P_adj=db(25.0), n_trials=100_000)
    estimates = run_average_sinr(config, workers=2)
    assert estimates[-5].lower > estimates[-4].upper


def test_realization_power_gain_averages_to_moments(make_config):
    config = make_config(Omega=2.0)
    grid = build_grid(config)
    h_l = grid_path_gains(config, grid)
    draws = np.array([draw_realization(config, grid, trial_stream(config.seed, i)).h2 for i in range(4000)])

    ratio = draws.mean(axis=0) / h_l**2

    expected = second_moment_hp(derive_beam(config.a, config.w_d, config.sigma_s)) * 2.0
    np.testing.assert_allclose(ratio, expected, rtol=5e-2)


def test_average_sinr_intervals_separate_along_beta_and_neighbor_power(make_config):
    base = make_config(P_adj=db(5.0), n_trials=100_000)
    by_beta = [average_sinr(simulate_sinr(base.with_updates(beta=b))) for b in (0.015e9, 0.15e9, 1.5e9, 3.0e9)]
    by_power = [average_sinr(simulate_sinr(base.with_updates(P_adj=db(p)))) for p in (5.0, 15.0, 25.0)]

    for series in (by_beta, by_power):
        for better, worse in zip(series, series[1:]):
            assert all(better[k].lower > worse[k].upper for k in better)


def test_average_sinr_falls_with_distance_and_jitter(make_config):
    base = make_config(n_trials=5000, P_adj=db(5.0))
    near = simulate_sinr(base).rho
    far = simulate_sinr(base.with_updates(d=25.0)).rho
    shaky = simulate_sinr(base.with_updates(sigma_s=0.05)).rho

    assert np.all(far < near)
    assert np.all(shaky <= near)
    assert np.all(shaky.mean(axis=0) < near.mean(axis=0))


def test_outage_non_decreasing_in_beta(make_config):
    gamma_th = db(15.0)
    previous = None
    for beta in (0.0, 0.015e9, 0.15e9, 1.5e9, 3.0e9):
        config = make_config(beta=beta, P_adj=db(15.0), n_trials=5000)
        op = outage(simulate_sinr(config), gamma_th)
        if previous is not None:
            assert all(op[k].value >= previous[k].value for k in op)
        previous = op


def test_total_leakage_bounds_adjacent_capture(make_config):
    adjacent = make_config(beta=3.0e9, ici_model="adjacent", P_adj=db(15.0), n_trials=5000)
    ceiling = adjacent.with_updates(ici_model="total_leakage")
    op_adjacent = outage(simulate_sinr(adjacent), 10.0)
    op_ceiling = outage(simulate_sinr(ceiling), 10.0)
    assert all(op_ceiling[k].value >= op_adjacent[k].value for k in op_adjacent)


def test_outage_curve_is_monotone(make_config):
    samples = simulate_sinr(make_config(n_trials=5000))
    thresholds = np.logspace(-3, 3, 25)

    curve = outage_curve(samples, thresholds, 1)

    values = [e.value for e in curve]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(outage(samples, thresholds[-1])[1].value)


def test_vanishing_threshold_gives_zero_outage(make_config):
    op = run_outage(make_config(n_trials=2000), gamma_th=1e-12, escalate=False)
    assert all(e.value == 0.0 for e in op.values())
    assert all(e.warning for e in op.values())


def test_outage_escalates_when_rare(make_config, monkeypatch):
    monkeypatch.setenv("THZSIM_ESCALATION_TRIALS", "3000")
    get_settings.cache_clear()
    op = run_outage(make_config(n_trials=1000), gamma_th=1e-12)
    assert all(e.n == 3000 for e in op.values())


@pytest.mark.parametrize("sigma_s, gamma_th_db", [(0.01, 15.0), (0.03, 10.0), (0.05, 5.0)])
def test_monte_carlo_outage_matches_quadrature(make_config, sigma_s, gamma_th_db):
    config = make_config(beta=0.0, sigma_s=sigma_s, n_trials=100_000)
    gamma_th = db(gamma_th_db)

    oracle = semi_analytic_op_no_phn(config, gamma_th)
    estimates = run_outage(config, gamma_th, escalate=False)

    for k, est in estimates.items():
        assert abs(est.value - oracle[k]) <= max(2 * est.half_width, 1e-3)


def test_quadrature_without_jitter(make_config):
    config = make_config(beta=0.0, sigma_s=0.0)
    oracle = semi_analytic_op_no_phn(config, 10.0)
    assert all(0.0 <= v <= 1.0 for v in oracle.values())
    # Lower carriers see more path gain
    assert oracle[-5] < oracle[5]


def test_quadrature_requires_no_phase_noise(make_config):
    with pytest.raises(ValueError):
        semi_analytic_op_no_phn(make_config(beta=1e9))


def test_average_needs_enough_trials(make_config):
    with pytest.raises(ValueError):
        run_average_sinr(make_config(n_trials=999))


def test_average_estimate_interval(make_config):
    estimates = average_sinr(simulate_sinr(make_config(n_trials=4000)))
    for est in estimates.values():
        assert est.n == 4000
        assert est.lower < est.value < est.upper
        assert est.upper - est.value == pytest.approx(est.half_width)


def test_proportion_estimate_intervals():
    rare = proportion_estimate(0, 1000, seed=1)
    assert rare.value == 0.0
    assert rare.lower == pytest.approx(0.0, abs=1e-12)
    assert rare.upper > 0.0
    assert rare.warning

    common = proportion_estimate(5000, 10_000, seed=1)
    assert common.value == 0.5
    assert common.half_width == pytest.approx(1.96 * math.sqrt(0.25 / 10_000), rel=1e-3)
    assert common.warning is None


def test_outage_rejects_non_positive_threshold(make_config):
    samples = simulate_sinr(make_config(n_trials=1000))
    with pytest.raises(ValueError):
        outage(samples, 0.0)
