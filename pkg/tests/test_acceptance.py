"""Acceptance criteria, each at its stated tolerance.

Every test records one ``PASS``/``FAIL criterion k: ...`` line, printed in the
terminal summary.
"""

import math
import time

import numpy as np
import pytest

from botnet_econ import (
    DefenseConfig,
    LearningCurve,
    RentMatrix,
    Scenario,
    TrafficProfile,
    buffer_traffic,
    build_uniform_schedule,
    reward_report,
    simulate_trials,
)
from botnet_econ.analysis import (
    SearchSpec,
    breakeven_success_prob,
    breakeven_usagefee,
    maxmin_attacker,
    min_attackers,
    minmax_attacker,
    rent_bound_slack,
    rent_ratio,
    saddle_objective,
)
from botnet_econ.cli import main
from botnet_econ.rewards import reward_target, target_income
from botnet_econ.serialization import builtin_scenario

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


def record(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_scenario(rng, constant=True, n_max=6):
    n = int(rng.integers(2, n_max + 1))
    T = float(rng.uniform(0.5, 60))
    if constant:
        traffic = TrafficProfile.constant(float(rng.uniform(0.1, 1e4)), T)
    else:
        k = int(rng.integers(1, 5))
        cuts = np.sort(rng.uniform(0, T, k - 1))
        counts = rng.uniform(0, 1e3, k)
        counts[0] += 1.0
        traffic = TrafficProfile(tuple(zip([0.0, *map(float, cuts)], map(float, counts))), T)
    C = float(rng.uniform(1, 1e4))
    C_min = float(rng.uniform(0, C))
    return Scenario(
        n, T, C, C_min,
        usagefee=float(rng.uniform(0, 50)),
        usagefee_max=float(rng.uniform(0, C_min)),
        p_win=float(rng.uniform(0, 0.1)),
        traffic=traffic,
        rents=RentMatrix(tuple(map(tuple, rng.uniform(0, 2 * C, (n, n)).tolist()))),
        curves=tuple(LearningCurve.exponential(float(a)) for a in rng.uniform(0.05, 5, n)),
    )


def test_criterion_1_attacker_count_constant():
    t0 = time.perf_counter()
    ratio = rent_ratio(50_000, 2800)
    N = min_attackers(50_000, 2800, 1.0, 1.0)
    elapsed = time.perf_counter() - t0
    ok = abs(ratio - 17.857) <= 1e-3 and math.floor(ratio) == 17 and N == 5 and elapsed < 1
    record(1, ok, f"ratio={ratio:.6f} floor={math.floor(ratio)} min_attackers={N} in {elapsed:.4f}s")


def test_criterion_2_breakeven_usagefee_closed_form():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst_form = worst_plug = 0.0
    for _ in range(1000):
        s = random_scenario(rng)
        sched = build_uniform_schedule(s.n_attackers, s.horizon)
        fee = breakeven_usagefee(s, sched)
        N = s.n_attackers
        closed = s.p_win + s.C * N * (N - 1) / s.horizon
        worst_form = max(worst_form, abs(fee - closed) / abs(closed))
        at_fee = s.replace(usagefee=fee)
        worst_plug = max(worst_plug, abs(reward_target(at_fee, sched)) / abs(target_income(at_fee)))
    elapsed = time.perf_counter() - t0
    ok = worst_form <= 1e-9 and worst_plug <= 1e-9 and elapsed < 5
    record(2, ok, f"max rel err closed form {worst_form:.2e}, plug-back {worst_plug:.2e}, 1000 scenarios in {elapsed:.2f}s")


def test_criterion_3_slack_iff_probability():
    rng = np.random.default_rng(3)
    bad = 0
    total = 0
    for k in range(1000):
        s = random_scenario(rng, constant=bool(k % 2))
        for i in range(1, s.n_attackers + 1):
            total += 1
            required = breakeven_success_prob(i, s).required_success_probability
            if (rent_bound_slack(i, s) >= 0) != (required <= 1):
                bad += 1
    record(3, bad == 0, f"{bad} counterexamples over {total} attacker checks in 1000 scenarios")


def test_criterion_4_saddle_vs_dense_grid():
    rng = np.random.default_rng(4)
    resolution = 100
    mismatches, search_worse, order_bad = [], 0, 0
    worst = 0.0
    for k in range(100):
        s = random_scenario(rng, constant=bool(k % 2), n_max=4)
        i = int(rng.integers(1, s.n_attackers + 1))
        f = saddle_objective(i, s)
        dense = np.array([f(float(x)) for x in np.linspace(0.0, s.horizon, 10 * resolution)])
        search = SearchSpec(0.0, s.horizon, resolution)
        hi, lo = maxmin_attacker(i, s, search), minmax_attacker(i, s, search)
        order_bad += hi.optimal_value < lo.optimal_value
        for res, ref, sign in ((hi, dense.max(), 1), (lo, dense.min(), -1)):
            gap = res.optimal_value - ref
            rel = abs(gap) / max(abs(ref), 1e-300)
            worst = max(worst, rel)
            if rel > 1e-6:
                mismatches.append(("constant" if s.traffic.is_constant else "piecewise", sign * gap > 0))
            search_worse += sign * gap < -1e-9 * max(abs(ref), 1.0)
    kinds = {kind for kind, _ in mismatches}
    all_better = all(better for _, better in mismatches)
    ok = not mismatches and order_bad == 0
    record(4, ok, f"{len(mismatches)}/200 optima differ from the 10x grid by >1e-6 rel (worst {worst:.2e}; "
                  f"traffic {sorted(kinds) or '-'}; search better in all: {all_better}); "
                  f"search worse than grid: {search_worse}; maxmin<minmax: {order_bad}")


def test_criterion_5_negative_maxmin_witness():
    s = builtin_scenario("negative_maxmin")
    res = maxmin_attacker(1, s, SearchSpec(0.0, 1.0))
    expected = -5000 + (1 - math.exp(-1)) * 100
    rel = abs(res.optimal_value - expected) / abs(expected)
    record(5, rel <= 1e-6, f"max-min value {res.optimal_value:.6f} at tau={res.optimizer_duration:.6f}, "
                           f"analytic {expected:.6f}, rel err {rel:.1e}")


def test_criterion_6_non_zero_sum():
    totals = []
    for name in ("nonzero_sum_low_fee", "nonzero_sum_high_fee"):
        s = builtin_scenario(name)
        totals.append(reward_report(s, build_uniform_schedule(s.n_attackers, s.horizon)).total)
    record(6, totals[0] != totals[1], f"total system reward {totals[0]:.6g} vs {totals[1]:.6g}")


def _mc_scenario(levels):
    return Scenario(
        3, 12.0, 2800.0, 10.0, 10.0, 5.0, 0.01,
        TrafficProfile(((0.0, 100.0), (5.0, 40.0), (9.0, 250.0)), 12.0),
        RentMatrix(((0, 100, 300), (200, 0, 50), (0, 400, 0))),
        tuple(LearningCurve.step(p) for p in levels),
        intrusion_cost_mode="expected",
    )


def test_criterion_7_monte_carlo_convergence():
    t0 = time.perf_counter()
    s = _mc_scenario((0.5, 0.5, 0.5))
    rep = reward_report(s, build_uniform_schedule(3, 12.0))
    trials = 100_000
    out = simulate_trials(s, DefenseConfig(), trials, master_seed=7)
    z = []
    for k in range(3):
        x = out.intrusion[:, k]
        z.append(abs(x.mean() - rep.intrusion[k]) / (x.std(ddof=1) / math.sqrt(trials)))
    exact = True
    for levels in ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (1.0, 0.0, 1.0)):
        s_d = _mc_scenario(levels)
        rep_d = reward_report(s_d, build_uniform_schedule(3, 12.0))
        out_d = simulate_trials(s_d, DefenseConfig(), 1000, master_seed=7)
        exact &= bool((out_d.reward == np.array([rep_d.target, *rep_d.attackers])).all())
    elapsed = time.perf_counter() - t0
    ok = max(z) <= 3 and exact and elapsed < 30
    record(7, ok, f"|mean - expected| / SE = {', '.join(f'{v:.2f}' for v in z)}; "
                  f"p in {{0,1}} exact: {exact}; {elapsed:.1f}s")


def test_criterion_8_virtual_bot_monotonicity():
    s = _mc_scenario((0.5, 0.7, 0.9))
    rep = reward_report(s, build_uniform_schedule(3, 12.0))
    rent_only = np.array(rep.rental) + np.array(rep.paymaster)
    means = []
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        out = simulate_trials(s, DefenseConfig(virtual_bot_fraction=v), 10_000, master_seed=8)
        means.append(out.reward[:, 1:].mean(axis=0))
    monotone = all((b <= a).all() for a, b in zip(means, means[1:]))
    at_one = np.allclose(means[-1], rent_only, rtol=1e-12, atol=1e-9)
    record(8, monotone and at_one, f"per-attacker means non-increasing: {monotone}; "
                                   f"v=1 equals rent-only income {rent_only.tolist()}: {at_one}")


def test_criterion_9_buffering_conservation():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(1000):
        T = float(rng.uniform(0.1, 100))
        k = int(rng.integers(1, 20))
        starts = [0.0, *sorted(map(float, rng.uniform(0, T, k - 1)))]
        profile = TrafficProfile(tuple(zip(starts, map(float, rng.uniform(0, 1e4, k)))), T)
        b = buffer_traffic(profile, float(rng.uniform(0.01, 2 * T)), float(rng.uniform(0.01, 1.0)))
        worst = max(worst, abs(b.total() - profile.total()) / max(profile.total(), 1e-300))
    record(9, worst <= 1e-9, f"max relative volume change {worst:.2e} over 1000 profiles")


def test_criterion_10_cli_determinism(tmp_path):
    commands = [
        ["analyze", "--scenario", "builtin:casino"],
        ["analyze", "--scenario", "builtin:rotation", "--format", "csv"],
        ["simulate", "--scenario", "builtin:rotation", "--trials", "500"],
        ["simulate", "--scenario", "builtin:casino", "--trials", "500", "--defense", "builtin:combined",
         "--format", "csv"],
        ["sweep", "--scenario", "builtin:nonzero_sum_low_fee", "--trials", "200",
         "--sweep", "scenario.usagefee=0:100:11"],
        ["sweep", "--scenario", "builtin:rotation", "--trials", "200", "--format", "json",
         "--sweep", "defense.virtual_bot_fraction=0:1:5"],
        ["defense-compare", "--scenario", "builtin:casino", "--trials", "500", "--defense", "builtin:payout_split"],
        ["defense-compare", "--scenario", "builtin:rotation", "--trials", "500", "--defense", "builtin:combined",
         "--format", "csv"],
    ]
    differing = []
    for k, argv in enumerate(commands):
        outs = []
        for run, extra in enumerate(([], [], ["--workers", "3"])):
            path = tmp_path / f"{k}_{run}"
            assert main(argv + extra + ["--seed", "12345", "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        if not outs[0] == outs[1] == outs[2]:
            differing.append(argv[0])
    record(10, not differing, f"{len(commands)} commands x (2 serial + 1 parallel runs), differing: {differing or 'none'}")
