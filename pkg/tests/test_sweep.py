import numpy as np
import pytest

from risbc.channel import (
    ScenarioConfig,
    draw_user_positions,
    position_rng,
    sample_realization,
)
from risbc.phases import StrategySpec, random_phases
from risbc.se import decompose, extended_phase, se_asymptotic, se_zf_exact, weak_cascaded_row
from risbc.sweep import (
    MethodSpec,
    SweepPlan,
    power_split_offset_check,
    run_sweep,
)


def method(precoder, kind, mode):
    return MethodSpec(precoder=precoder, strategy=StrategySpec(kind=kind), mode=mode)


def small_cfg(**kw):
    base = dict(n_bs=4, n_strong=2, n_ris=8, ptx_dbm=30)
    base.update(kw)
    return ScenarioConfig(**base)


# ------------------------------------------------------------------ specs


def test_method_label():
    assert method("DPC", "align_weak", "exact").label == "DPC:align_weak:exact"


def test_method_rejects_unknowns():
    with pytest.raises(ValueError):
        method("MRT", "align_weak", "exact")
    with pytest.raises(ValueError):
        method("ZF", "align_weak", "closed_form")


def test_plan_validation():
    m = (method("ZF", "align_weak", "exact"),)
    cfg = small_cfg()
    with pytest.raises(ValueError):
        SweepPlan(cfg, "snr", (0.0,), m)
    with pytest.raises(ValueError):
        SweepPlan(cfg, "ptx_dbm", (), m)
    with pytest.raises(ValueError):
        SweepPlan(cfg, "ptx_dbm", (10.0, 10.0), m)
    with pytest.raises(ValueError):
        SweepPlan(cfg, "n_bs", (4.5, 6.0), m)
    with pytest.raises(ValueError):
        SweepPlan(cfg, "xi", (-1.0, 2.0), m)
    with pytest.raises(ValueError):
        SweepPlan(cfg, "ptx_dbm", (0.0,), ())
    with pytest.raises(ValueError):
        SweepPlan(cfg, "ptx_dbm", (0.0,), m, reps=0)


# ------------------------------------------------------------------ harness


def test_harness_is_transparent():
    # one rep, frozen positions: the row must equal a by-hand evaluation
    # following the same substream convention
    cfg = small_cfg(freeze_positions=True)
    plan = SweepPlan(cfg, "ptx_dbm", (30.0,), (method("ZF", "align_weak", "exact"),), reps=1)
    row = run_sweep(plan).rows[0]

    pos = draw_user_positions(cfg, position_rng(cfg.seed))
    ch_ss, _ = np.random.SeedSequence([cfg.seed, 0]).spawn(2)
    real = sample_realization(cfg, np.random.default_rng(ch_ss), positions=pos)
    cache = decompose(real)
    h_c_weak = weak_cascaded_row(real)
    theta = np.exp(-1j * np.angle(h_c_weak))
    br = se_zf_exact(cache, extended_phase(theta), h_c_weak, cfg.p_bar())

    assert row.se_mean == pytest.approx(br.se_total, abs=1e-12)
    assert row.se_d_mean == pytest.approx(br.se_direct, abs=1e-12)
    assert row.se_r_mean == pytest.approx(br.se_reflect, abs=1e-12)
    assert row.se_std == 0.0
    assert row.reps == 1 and row.flagged == 0


def test_randomized_strategies_are_paired():
    # ZF and DPC with random phases must see the same draw per replication
    cfg = small_cfg()
    reps = 5
    plan = SweepPlan(
        cfg,
        "ptx_dbm",
        (20.0,),
        (method("ZF", "random", "asymptotic"), method("DPC", "random", "asymptotic")),
        reps=reps,
    )
    rows = {(r.precoder): r for r in run_sweep(plan).rows}

    swept = cfg.with_updates(ptx_dbm=20.0)
    want = {"ZF": [], "DPC": []}
    for rep in range(reps):
        ch_ss, ph_ss = np.random.SeedSequence([swept.seed, rep]).spawn(2)
        real = sample_realization(swept, np.random.default_rng(ch_ss))
        cache = decompose(real)
        h_c_weak = weak_cascaded_row(real)
        theta = random_phases(swept.n_ris, np.random.default_rng(ph_ss))
        phase = extended_phase(theta)
        for prec in ("ZF", "DPC"):
            want[prec].append(
                se_asymptotic(cache, phase, h_c_weak, swept.p_bar(), prec).se_total
            )
    for prec in ("ZF", "DPC"):
        assert rows[prec].se_mean == pytest.approx(np.mean(want[prec]), abs=1e-12)
        assert rows[prec].se_std == pytest.approx(np.std(want[prec]), abs=1e-12)


def test_workers_do_not_change_results():
    plan = SweepPlan(
        small_cfg(),
        "ptx_dbm",
        (10.0, 30.0),
        (method("ZF", "random", "exact"), method("DPC", "mitigation_aware", "exact")),
        reps=8,
    )
    serial = run_sweep(plan, workers=1)
    threaded = run_sweep(plan, workers=4)
    for a, b in zip(serial.rows, threaded.rows):
        assert a == b


def test_dpc_dominates_zf_pointwise():
    plan = SweepPlan(
        small_cfg(),
        "ptx_dbm",
        (0.0, 20.0, 40.0),
        (method("ZF", "align_weak", "exact"), method("DPC", "align_weak", "exact")),
        reps=10,
    )
    result = run_sweep(plan)
    _, zf = result.series("ZF:align_weak:exact")
    _, dpc = result.series("DPC:align_weak:exact")
    assert np.all(dpc >= zf - 1e-12)
    assert np.all(np.diff(zf) > 0) and np.all(np.diff(dpc) > 0)


def test_split_means_add_up():
    plan = SweepPlan(
        small_cfg(),
        "ptx_dbm",
        (10.0, 40.0),
        (
            method("ZF", "align_weak", "exact"),
            method("DPC", "align_weak", "asymptotic"),
        ),
        reps=6,
    )
    for row in run_sweep(plan).rows:
        assert row.se_mean == pytest.approx(row.se_d_mean + row.se_r_mean, abs=1e-9)


def test_n_ris_sweep_applies_variable():
    plan = SweepPlan(
        small_cfg(),
        "n_ris",
        (4, 64),
        (method("DPC", "align_weak", "asymptotic"),),
        reps=5,
    )
    _, se = run_sweep(plan).series("DPC:align_weak:asymptotic")
    # aligned weak-user gain scales like N_R^2: 4 bpcu per 16x elements
    assert se[1] - se[0] > 3.0


def test_xi_zero_draws_are_flagged_and_abort():
    # xi = 0 puts the BS-RIS direction inside the strong users' row space,
    # so every projected Gram matrix is singular and every draw is flagged
    plan = SweepPlan(
        small_cfg(),
        "xi",
        (0.0,),
        (method("DPC", "align_weak", "exact"),),
        reps=4,
    )
    with pytest.raises(RuntimeError, match="flagged"):
        run_sweep(plan)


def test_xi_sweep_moves_direct_rate():
    plan = SweepPlan(
        small_cfg(),
        "xi",
        (0.1, 10.0),
        (method("DPC", "align_weak", "asymptotic"),),
        reps=20,
    )
    rows = run_sweep(plan).rows
    assert rows[1].se_d_mean > rows[0].se_d_mean


def test_series_unknown_label():
    plan = SweepPlan(
        small_cfg(), "ptx_dbm", (10.0,), (method("ZF", "align_weak", "exact"),), reps=1
    )
    with pytest.raises(KeyError):
        run_sweep(plan).series("DPC:align_weak:exact")


# ------------------------------------------------------------------ offset


def test_power_split_offset_single_strong_user():
    cfg = ScenarioConfig(n_bs=4, n_strong=1, n_ris=8, ptx_dbm=40)
    assert power_split_offset_check(cfg, reps=50) == pytest.approx(1.0, abs=1e-6)


def test_power_split_offset_three_strong_users():
    cfg = ScenarioConfig(n_bs=4, n_strong=3, n_ris=8, ptx_dbm=40)
    off = power_split_offset_check(cfg, reps=50)
    assert off == pytest.approx(3 * np.log2(4.0 / 3.0), abs=1e-6)
