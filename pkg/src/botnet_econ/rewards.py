"""Reward functionals for the customer, the target and each attacker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .scenario import IntrusionCostMode, Scenario, TargetCostMode, TrafficProfile
from .schedule import AttackSchedule


def reward_customer(s: Scenario, payout: Optional[float] = None) -> float:
    """Net reward per game session to a paying customer: p_win * C - usagefee."""
    return s.p_win * (s.C if payout is None else payout) - s.usagefee


def win_cost_per_customer_day(s: Scenario) -> float:
    if s.target_cost_mode is TargetCostMode.AS_WRITTEN:
        return s.p_win
    return s.p_win * s.C


def target_income(s: Scenario, traffic: Optional[TrafficProfile] = None) -> float:
    """Usage fees net of customer winnings over the horizon."""
    traffic = traffic or s.traffic
    return (s.usagefee - win_cost_per_customer_day(s)) * traffic.total()


def intrusion_amounts(s: Scenario, sched: AttackSchedule, factors: Sequence[float],
                      payouts: Sequence[float], traffic: Optional[TrafficProfile] = None) -> list[float]:
    """Per-slot intrusion money: factor * payout * n(slot end).

    ``factors`` are success probabilities for expectations or 0/1 outcomes
    for realized draws; both paths share this arithmetic.
    """
    traffic = traffic or s.traffic
    return [f * c * traffic.value(slot.end) for f, c, slot in zip(factors, payouts, sched.slots)]


def rental_flows(s: Scenario, sched: AttackSchedule) -> tuple[list[float], list[float]]:
    """Rent ledger as ``(transfers, paymaster)`` lists indexed by attacker - 1.

    Each non-diagonal slot moves ``rate(landlord, tenant) * duration`` from
    tenant to landlord; diagonal slots credit ``rate(i, i) * duration`` from
    an outside paymaster.
    """
    n = s.n_attackers
    transfers = [0.0] * n
    paymaster = [0.0] * n
    for slot in sched.slots:
        amount = s.rents.rate(slot.landlord, slot.attacker) * slot.duration
        if slot.is_diagonal:
            paymaster[slot.attacker - 1] += amount
        else:
            transfers[slot.attacker - 1] -= amount
            transfers[slot.landlord - 1] += amount
    return transfers, paymaster


def expected_factors(s: Scenario, sched: AttackSchedule) -> list[float]:
    return [s.curve(slot.attacker)(slot.duration) for slot in sched.slots]


def reward_target(s: Scenario, sched: AttackSchedule) -> float:
    """Target's cumulated reward: net fee income minus intrusion losses."""
    sched.validate_for(s)
    if s.intrusion_cost_mode is IntrusionCostMode.EXPECTED:
        factors = expected_factors(s, sched)
    else:
        factors = [1.0] * len(sched)
    loss = sum(intrusion_amounts(s, sched, factors, [s.C] * len(sched)))
    return target_income(s) - loss


def _per_attacker(s: Scenario, sched: AttackSchedule, amounts: Sequence[float]) -> list[float]:
    out = [0.0] * s.n_attackers
    for slot, amount in zip(sched.slots, amounts):
        out[slot.attacker - 1] += amount
    return out


def reward_attacker(i: int, s: Scenario, sched: AttackSchedule) -> float:
    """Attacker ``i``'s rent differential plus expected intrusion income."""
    s.check_attacker(i)
    sched.validate_for(s)
    transfers, paymaster = rental_flows(s, sched)
    amounts = intrusion_amounts(s, sched, expected_factors(s, sched), [s.C] * len(sched))
    return transfers[i - 1] + paymaster[i - 1] + _per_attacker(s, sched, amounts)[i - 1]


@dataclass(frozen=True)
class RewardReport:
    target: float
    attackers: tuple[float, ...]
    per_customer: float
    rental: tuple[float, ...]
    paymaster: tuple[float, ...]
    intrusion: tuple[float, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def total(self) -> float:
        """Whole-system reward (target plus attackers)."""
        return self.target + sum(self.attackers)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "attackers": list(self.attackers),
            "per_customer": self.per_customer,
            "rental": list(self.rental),
            "paymaster": list(self.paymaster),
            "intrusion": list(self.intrusion),
            "total": self.total,
            "metadata": dict(self.metadata),
        }


def reward_report(s: Scenario, sched: AttackSchedule, seed=None) -> RewardReport:
    from .serialization import scenario_hash

    sched.validate_for(s)
    transfers, paymaster = rental_flows(s, sched)
    amounts = intrusion_amounts(s, sched, expected_factors(s, sched), [s.C] * len(sched))
    intrusion = _per_attacker(s, sched, amounts)
    attackers = tuple(r + p + x for r, p, x in zip(transfers, paymaster, intrusion))
    metadata = {
        "scenario_hash": scenario_hash(s),
        "target_cost_mode": s.target_cost_mode.value,
        "intrusion_cost_mode": s.intrusion_cost_mode.value,
    }
    if seed is not None:
        metadata["seed"] = seed
    return RewardReport(
        target=reward_target(s, sched),
        attackers=attackers,
        per_customer=reward_customer(s),
        rental=tuple(transfers),
        paymaster=tuple(paymaster),
        intrusion=tuple(intrusion),
        metadata=metadata,
    )
