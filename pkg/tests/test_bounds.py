import numpy as np
import pytest
from scipy.special import exp1

from risbc.bounds import (
    EULER_GAMMA,
    BoundReport,
    aligned_phase_closed_forms,
    bound_gap,
    bound_gap_structure,
    chi2_log_expectation_check,
    default_log_grid,
    e1_bound_comparison_check,
    e1_product_bound_check,
    e1_product_log_bound_check,
    exp_integral_e1,
    exp_integral_e1_scaled,
    harmonic_mean_bound_check,
    random_phase_closed_forms,
    reflected_rate_upper_bound,
    standard_bound_reports,
)
from risbc.channel import (
    PathlossSet,
    ScenarioConfig,
    build_covariances,
    draw_user_positions,
    nominal_pathlosses,
    position_rng,
    rep_rng,
    sample_realization,
    steering_vector,
)
from risbc.phases import random_phases
from risbc.se import decompose, extended_phase, se_asymptotic, weak_cascaded_row

# reference values computed with 40-digit arithmetic
E1_AT_1 = 0.2193839343955202737
E1_AT_HALF = 0.5597735947761608117
E1_AT_2 = 0.04890051070806111957
SCALED_AT_1 = 0.5963473623231940743
SCALED_AT_30 = 0.03228973875898012522
SCALED_AT_1E4 = 9.999000199940023988e-5
GAP_X_MAX = 0.2127986435992488
GAP_VALUE_MAX = 0.128194279305
BRACKET_HI = 0.7188315329474753
LOG2_2_EXP_NEG_GAMMA = 0.16725382272313285


# ------------------------------------------------------------------ E1


def test_e1_reference_values():
    assert exp_integral_e1(1.0) == pytest.approx(E1_AT_1, rel=1e-13)
    assert exp_integral_e1(0.5) == pytest.approx(E1_AT_HALF, rel=1e-13)
    assert exp_integral_e1(2.0) == pytest.approx(E1_AT_2, rel=1e-13)


def test_e1_matches_scipy_across_regimes():
    for x in np.logspace(-8, np.log10(700.0), 400):
        assert exp_integral_e1(x) == pytest.approx(float(exp1(x)), rel=1e-12)


def test_e1_series_fraction_crossover_consistent():
    below = exp_integral_e1(1.0)
    above = exp_integral_e1(1.0 + 1e-7)
    assert abs(below - above) / below < 1e-6


def test_e1_scaled_reference_values():
    assert exp_integral_e1_scaled(1.0) == pytest.approx(SCALED_AT_1, rel=1e-13)
    assert exp_integral_e1_scaled(30.0) == pytest.approx(SCALED_AT_30, rel=1e-13)
    assert exp_integral_e1_scaled(1e4) == pytest.approx(SCALED_AT_1E4, rel=1e-12)


def test_e1_scaled_no_overflow_far_out():
    v = exp_integral_e1_scaled(1e8)
    assert np.isfinite(v) and v == pytest.approx(1e-8, rel=1e-4)


def test_e1_asymptotic_tail():
    # e^x E1(x) -> 1/x: ratio within 0.2% at x = 1e3
    assert exp_integral_e1_scaled(1e3) * 1e3 == pytest.approx(1.0, rel=2e-3)


def test_e1_small_x_limit():
    x = 1e-8
    assert abs(exp_integral_e1(x) + EULER_GAMMA + np.log(x)) < 1e-7


def test_e1_rejects_nonpositive():
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            exp_integral_e1(bad)
        with pytest.raises(ValueError):
            exp_integral_e1_scaled(bad)


# ------------------------------------------------------------------ bound grid


def test_product_bound_positive_on_grid():
    for x in default_log_grid(1000):
        rep = e1_product_bound_check(x)
        assert rep.satisfied and rep.slack > 0.0


def test_product_bound_known_slacks():
    assert e1_product_bound_check(1.0).slack == pytest.approx(0.150726412042, abs=1e-9)
    tiny = e1_product_bound_check(1e-8)
    assert 0.0 < tiny.slack < 1e-6
    far = e1_product_bound_check(1e4)
    assert 0.0 < far.slack < 1e-4


def test_log_bound_positive_and_weaker():
    for x in default_log_grid(1000):
        assert e1_product_log_bound_check(x).slack > 0.0
        comp = e1_bound_comparison_check(x)
        assert comp.satisfied and comp.slack > 0.0


# ------------------------------------------------------------------ gap shape


def test_gap_structure():
    gs = bound_gap_structure()
    assert gs.bracket_hi == pytest.approx(BRACKET_HI, rel=1e-12)
    assert gs.bracket_hi == pytest.approx(
        np.exp(-2 * EULER_GAMMA) / (1 - np.exp(-EULER_GAMMA)), rel=1e-15
    )
    assert gs.x_max == pytest.approx(GAP_X_MAX, abs=1e-6)
    assert gs.value_max == pytest.approx(GAP_VALUE_MAX, abs=1e-9)
    assert gs.inside_bracket
    assert gs.unimodal
    assert gs.increasing_before and gs.decreasing_after
    assert gs.value_max > bound_gap(1e-8)
    assert gs.value_max > bound_gap(10.0)


# ------------------------------------------------------------------ chi2


def test_chi2_log_expectation():
    rep = chi2_log_expectation_check(np.random.default_rng(0), reps=100_000)
    assert rep.rhs == pytest.approx(LOG2_2_EXP_NEG_GAMMA, rel=1e-12)
    assert rep.rhs == pytest.approx(1.0 - EULER_GAMMA / np.log(2.0), rel=1e-12)
    assert abs(rep.slack) < 0.01
    assert rep.satisfied


def test_chi2_log_scaling_additivity():
    xs = np.random.default_rng(1).chisquare(2, 10_000)
    shift = np.mean(np.log2(8.0 * xs)) - np.mean(np.log2(xs))
    assert shift == pytest.approx(3.0, abs=1e-12)


def test_chi2_check_rejects_small_samples():
    with pytest.raises(ValueError):
        chi2_log_expectation_check(np.random.default_rng(0), reps=100)


# ------------------------------------------------------------------ harmonic


def test_harmonic_identity_matrix_is_tight():
    h = np.array([1.0 + 1j, 2.0, -1j])
    rep = harmonic_mean_bound_check(h, np.eye(3))
    assert abs(rep.slack) < 1e-12 and rep.satisfied


def test_harmonic_eigenvector_is_tight():
    M = np.diag([4.0, 1.0, 0.25])
    h = np.array([0.0, 3.0, 0.0])
    rep = harmonic_mean_bound_check(h, M)
    assert abs(rep.slack) < 1e-12


def test_harmonic_random_trials():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        M = A @ A.conj().T + 0.1 * np.eye(n)
        h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert harmonic_mean_bound_check(h, M).slack >= -1e-12


# ------------------------------------------------------- ergodic closed forms


def unit_pathlosses(n_users):
    return PathlossSet(L_d=np.ones(n_users), L_r=np.ones(n_users), L_G=1.0)


def test_random_phase_forms_reduce_for_unit_gains():
    cfg = ScenarioConfig(n_bs=8, n_strong=1, n_ris=32)
    lin_upper, _ = random_phase_closed_forms(cfg, unit_pathlosses(2), 50.0)
    assert lin_upper == pytest.approx(np.log2(8 * 50.0), rel=1e-12)


def test_random_phase_lin_upper_ignores_n_ris():
    pl = unit_pathlosses(4)
    a = random_phase_closed_forms(ScenarioConfig(n_ris=16), pl, 10.0)[0]
    b = random_phase_closed_forms(ScenarioConfig(n_ris=256), pl, 10.0)[0]
    assert a == b


def test_dpc_doubling_slopes():
    pl = unit_pathlosses(4)
    r1 = random_phase_closed_forms(ScenarioConfig(n_ris=32), pl, 10.0)[1]
    r2 = random_phase_closed_forms(ScenarioConfig(n_ris=64), pl, 10.0)[1]
    assert r2 - r1 == pytest.approx(1.0, abs=1e-12)
    a1 = aligned_phase_closed_forms(ScenarioConfig(n_ris=32), pl, 10.0)[1]
    a2 = aligned_phase_closed_forms(ScenarioConfig(n_ris=64), pl, 10.0)[1]
    assert a2 - a1 == pytest.approx(2.0, abs=1e-12)


def test_reflected_upper_bound_theta_invariant_denominator():
    # i.i.d. covariances make theta^H R_c theta the same for every
    # unit-modulus theta, so swapping theta only moves the numerator
    cfg = ScenarioConfig(n_bs=6, n_ris=8)
    pos = draw_user_positions(cfg, position_rng(0))
    pl = nominal_pathlosses(cfg, pos)
    covs = build_covariances(cfg, steering_vector(8, np.pi / 2, "sqrt_n"), pl)
    rng = np.random.default_rng(3)
    rows = rng.standard_normal((50, 8)) + 1j * rng.standard_normal((50, 8))
    t1 = random_phases(8, np.random.default_rng(4))
    t2 = random_phases(8, np.random.default_rng(5))
    b1 = reflected_rate_upper_bound(t1, rows, covs, 10.0)
    b2 = reflected_rate_upper_bound(t2, rows, covs, 10.0)
    g1 = np.mean(np.log2(np.abs(rows @ t1) ** 2))
    g2 = np.mean(np.log2(np.abs(rows @ t2) ** 2))
    assert b1 - b2 == pytest.approx(g1 - g2, abs=1e-9)


def test_reflected_upper_bound_holds_in_monte_carlo():
    # smoke-scale version of the ergodic bound check with random phases
    cfg = ScenarioConfig(n_bs=12, n_ris=16, freeze_positions=True)
    pos = draw_user_positions(cfg, position_rng(cfg.seed))
    pl = nominal_pathlosses(cfg, pos)
    reps = 500
    p_bar = cfg.p_bar()
    se_r = np.empty(reps)
    rows = np.empty((reps, cfg.n_ris), dtype=complex)
    thetas = np.empty((reps, cfg.n_ris), dtype=complex)
    a = None
    for r in range(reps):
        rng = rep_rng(cfg.seed, r)
        real = sample_realization(cfg, rng, positions=pos)
        theta = random_phases(cfg.n_ris, rng)
        cache = decompose(real)
        h_c_weak = weak_cascaded_row(real)
        se_r[r] = se_asymptotic(cache, extended_phase(theta), h_c_weak, p_bar, "ZF").se_reflect
        rows[r] = h_c_weak
        thetas[r] = theta
        a = real.a
    covs = build_covariances(cfg, a, pl)
    bound = reflected_rate_upper_bound(thetas, rows, covs, p_bar)
    assert np.mean(se_r) <= bound


def test_standard_bound_reports_all_satisfied():
    reports = standard_bound_reports(seed=0, grid_points=100)
    assert len(reports) == 2 * 100 + 2
    assert all(isinstance(r, BoundReport) for r in reports)
    assert all(r.satisfied for r in reports)
    assert sum(r.name == "e1_product_bound" for r in reports) == 100
