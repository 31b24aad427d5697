import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from botnet_econ import (
    AttackSchedule,
    LearningCurve,
    ScenarioError,
    Slot,
    TrafficProfile,
    build_markov_schedule,
    build_uniform_schedule,
    reward_attacker,
    reward_customer,
    reward_report,
    reward_target,
)
from botnet_econ.rewards import rental_flows

from conftest import make_scenario


def rent_ledger(s, sched):
    """Independent oracle: walk the slots and book every rent payment."""
    book = {i: 0.0 for i in range(1, s.n_attackers + 1)}
    for slot in sched:
        if slot.landlord == slot.attacker:
            continue
        fee = s.rents.rates[slot.landlord - 1][slot.attacker - 1] * slot.duration
        book[slot.attacker] -= fee
        book[slot.landlord] += fee
    return book


class TestCustomer:
    def test_zero(self):
        assert reward_customer(make_scenario(p_win=0, usagefee=0, C=12345)) == 0

    def test_case_ceiling(self):
        assert reward_customer(make_scenario(p_win=0.01, C=2800, usagefee=10)) == pytest.approx(18)

    def test_break_even_customer(self):
        assert reward_customer(make_scenario(p_win=0.005, C=2800, usagefee=14)) == pytest.approx(0, abs=1e-12)


class TestTarget:
    def test_empty_schedule_fee_equals_pwin(self):
        s = make_scenario(usagefee=0.01, p_win=0.01)
        assert reward_target(s, AttackSchedule((), s.horizon)) == 0

    def test_worst_case(self):
        s = make_scenario(horizon=10, usagefee=10, p_win=0.01, C=2800)
        assert reward_target(s, build_uniform_schedule(2, 10)) == pytest.approx(-550_010)

    def test_expected(self):
        s = make_scenario(horizon=10, usagefee=10, p_win=0.01, C=2800,
                          curves=(LearningCurve.step(0.5),) * 2, intrusion_cost_mode="expected")
        assert reward_target(s, build_uniform_schedule(2, 10)) == pytest.approx(-270_010)

    def test_consistent_mode(self):
        s = make_scenario(horizon=10, usagefee=10, p_win=0.01, C=2800, target_cost_mode="consistent")
        # (10 - 0.01 * 2800) * 1000 - 2800 * 200
        assert reward_target(s, build_uniform_schedule(2, 10)) == pytest.approx(-18_000 - 560_000)

    def test_reduces_to_closed_form_with_piecewise_traffic(self):
        # uniform schedule, as-written / worst-case: the sum runs over n(k * dt), k = 1..A
        traffic = TrafficProfile(((0, 3), (1.7, 11), (4.2, 5)), 6)
        s = make_scenario(n=3, horizon=6, traffic=traffic, usagefee=4, p_win=0.2, C=7)
        A, dt = 6, 1.0
        expected = (4 - 0.2) * traffic.integrate(0, 6) - 7 * sum(traffic.value(k * dt) for k in range(1, A + 1))
        assert reward_target(s, build_uniform_schedule(3, 6)) == pytest.approx(expected)

    def test_non_increasing_in_slot_count(self):
        s = make_scenario(n=4, horizon=12)
        sched = build_uniform_schedule(4, 12)
        values = [reward_target(s, AttackSchedule(sched.slots[:k], 12)) for k in range(len(sched) + 1)]
        assert all(b <= a for a, b in zip(values, values[1:]))


class TestAttacker:
    def test_symmetric_no_learning(self):
        s = make_scenario(rents=[[0, 300], [300, 0]], curves=(LearningCurve.zero(),) * 2)
        sched = build_uniform_schedule(2, 10)
        assert reward_attacker(1, s, sched) == 0
        assert reward_attacker(2, s, sched) == 0

    def test_intrusion_income(self):
        s = make_scenario(rents=[[0, 300], [300, 0]], curves=(LearningCurve.step(0.5),) * 2)
        assert reward_attacker(1, s, build_uniform_schedule(2, 10)) == pytest.approx(140_000)

    def test_rent_ledger(self):
        # rate(1, 2): landlord 1 collects 1000/day from tenant 2
        s = make_scenario(horizon=2, rents=[[0, 1000], [0, 0]], curves=(LearningCurve.zero(),) * 2)
        sched = build_uniform_schedule(2, 2)
        assert reward_attacker(1, s, sched) == 1000
        assert reward_attacker(2, s, sched) == -1000
        assert rent_ledger(s, sched) == {1: 1000, 2: -1000}

    def test_closed_form_two_attackers(self):
        traffic = TrafficProfile(((0, 20), (3, 70)), 4)
        curves = (LearningCurve.exponential(0.8), LearningCurve.exponential(2.0))
        s = make_scenario(horizon=4, traffic=traffic, rents=[[0, 120], [45, 0]], curves=curves, C=50)
        dt = 2.0
        for i, j, t_i in ((1, 2, 0.0), (2, 1, 2.0)):
            rent = (s.rents.rate(i, j) - s.rents.rate(j, i)) * dt
            expected = rent + curves[i - 1](dt) * 50 * traffic.value(t_i + dt)
            assert reward_attacker(i, s, build_uniform_schedule(2, 4)) == pytest.approx(expected)

    def test_paymaster_diagonal(self):
        s = make_scenario(n=2, horizon=4, rents=[[250, 0], [0, 0]], curves=(LearningCurve.zero(),) * 2)
        sched = AttackSchedule((Slot(1, 0, 2, 1), Slot(2, 2, 1, 1)), 4)
        transfers, paymaster = rental_flows(s, sched)
        assert paymaster == [500, 0]
        assert transfers == [0, 0]
        assert reward_attacker(1, s, sched) == 500

    def test_out_of_range(self):
        s = make_scenario()
        with pytest.raises(ScenarioError):
            reward_attacker(3, s, build_uniform_schedule(2, 10))

    def test_monotone_in_ceiling(self):
        s = make_scenario(n=3, horizon=6, rents=[[0, 5, 1], [2, 0, 9], [4, 4, 0]],
                          intrusion_cost_mode="expected")
        sched = build_uniform_schedule(3, 6)
        for i in (1, 2, 3):
            vals = [reward_attacker(i, s.replace(C=c), sched) for c in (0, 10, 100, 2800, 1e5)]
            assert vals == sorted(vals)


class TestReport:
    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(2, 5), seed=st.integers(0, 2**31), markov=st.booleans())
    def test_rent_conservation(self, n, seed, markov):
        rng = np.random.default_rng(seed)
        s = make_scenario(n=n, horizon=10, rents=rng.uniform(0, 1e4, (n, n)).tolist())
        if markov:
            sched = build_markov_schedule(s, (rng.random((n + 1, n + 1)) + 0.05).tolist(), seed=seed)
        else:
            sched = build_uniform_schedule(n, 10)
        rep = reward_report(s, sched)
        assert abs(sum(rep.rental)) <= 1e-9 * (sum(abs(x) for x in rep.rental) + 1)
        oracle = rent_ledger(s, sched)
        for i in range(1, n + 1):
            assert rep.rental[i - 1] == pytest.approx(oracle[i], rel=1e-12, abs=1e-9)

    def test_matches_single_operations(self):
        s = make_scenario(horizon=10, usagefee=10, p_win=0.01, C=2800)
        sched = build_uniform_schedule(2, 10)
        rep = reward_report(s, sched)
        assert rep.target == reward_target(s, sched) == pytest.approx(-550_010)
        assert rep.attackers == (reward_attacker(1, s, sched), reward_attacker(2, s, sched))
        assert rep.per_customer == reward_customer(s)
        assert len(rep.attackers) == 2
        assert rep.metadata["intrusion_cost_mode"] == "worst-case"
        assert len(rep.metadata["scenario_hash"]) == 64

    def test_not_zero_sum(self):
        sched = build_uniform_schedule(2, 10)
        low = reward_report(make_scenario(usagefee=10), sched)
        high = reward_report(make_scenario(usagefee=20), sched)
        assert high.attackers == low.attackers
        assert high.total - low.total == pytest.approx(10 * 1000)

    def test_pure_function(self):
        s = make_scenario(n=3, horizon=6)
        sched = build_uniform_schedule(3, 6)
        assert reward_report(s, sched) == reward_report(s, sched)
