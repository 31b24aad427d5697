"""Seeded Monte Carlo of realized rewards, with and without defenses.

Trial ``t`` draws from two independent streams seeded by
``SeedSequence(master_seed, spawn_key=(t, 0))`` (schedule sampling) and
``(t, 1)`` (intrusion outcomes).  A trial's randomness therefore depends only
on the master seed and its index, so any split of the trials across worker
processes reproduces the serial result bit for bit.  Because the same
uniforms are reused across defense settings, comparisons use common random
numbers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .defense import DefenseConfig, apply_virtual_attacker, buffer_traffic
from .errors import ScenarioError
from .rewards import intrusion_amounts, rental_flows, reward_customer, target_income
from .scenario import Scenario, TrafficProfile
from .schedule import AttackSchedule, build_uniform_schedule, schedule_for

STREAM_SCHEDULE = 0
STREAM_OUTCOME = 1


def trial_seed(master_seed: int, trial: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(trial, stream))


@dataclass
class TrialOutcomes:
    """Per-trial realized quantities, rows in trial-index order.

    ``reward`` columns are the target then attackers 1..N (including a
    virtual attacker if one was injected); the other arrays have one column
    per attacker.
    """

    players: tuple[str, ...]
    reward: np.ndarray
    intrusion: np.ndarray
    rent: np.ndarray
    renegotiation: np.ndarray
    attacks: np.ndarray


def _window_index(t: float, window: float) -> int:
    return int(t // window)


def _splice_buffered(traffic: TrafficProfile, window: float, dense: set, duty: float) -> TrafficProfile:
    """Buffer only the windows listed in ``dense``."""
    T = traffic.horizon
    points = []
    k = 0
    while k * window < T:
        a, b = k * window, min((k + 1) * window, T)
        if k in dense and duty < 1:
            burst = a + (1 - duty) * (b - a)
            points.append((a, 0.0))
            points.append((burst, traffic.integrate(a, b) / (b - burst)))
        else:
            points.append((a, traffic.value(a)))
            points.extend(p for p in traffic.breakpoints if a < p[0] < b)
        k += 1
    merged = []
    for t, n in points:
        if merged and merged[-1][1] == n:
            continue
        merged.append((t, n))
    return TrafficProfile(tuple(merged), T)


class _TrialRunner:
    def __init__(self, s: Scenario, d: DefenseConfig, master_seed: int):
        self.s = s
        self.d = d
        self.master_seed = master_seed
        self.traffic = buffer_traffic(s.traffic, d.buffering.window, d.buffering.duty) if d.buffering else s.traffic
        self.base_payout = d.payout_split.realtime if d.payout_split else s.C
        self.income = target_income(s, self.traffic)
        self.fixed = build_uniform_schedule(s.n_attackers, s.horizon) if s.schedule is None else None
        if self.fixed is not None:
            self.fixed_probs = self._probs(self.fixed)
            self.fixed_rent = rental_flows(s, self.fixed)

    def _probs(self, sched):
        return np.array([self.s.curve(x.attacker)(x.duration) for x in sched.slots])

    def _adaptive(self, sched: AttackSchedule):
        policy = self.d.adaptive_policy
        payouts = [self.base_payout] * len(sched)
        traffic = self.traffic
        if policy is None:
            return payouts, traffic
        counts: dict[int, int] = {}
        for slot in sched.slots:
            k = _window_index(slot.start, policy.window)
            counts[k] = counts.get(k, 0) + 1
        n_windows = int(np.ceil(self.s.horizon / policy.window))
        dense = {k for k in range(1, n_windows + 1) if counts.get(k - 1, 0) >= policy.attack_threshold}
        if not dense:
            return payouts, traffic
        payouts = [
            self.base_payout * policy.cmin_multiplier
            if _window_index(min(slot.end, self.s.horizon * (1 - 1e-15)), policy.window) in dense
            else self.base_payout
            for slot in sched.slots
        ]
        if policy.buffer_duty is not None:
            traffic = _splice_buffered(traffic, policy.window, dense, policy.buffer_duty)
        return payouts, traffic

    def run(self, trial: int):
        s, d = self.s, self.d
        n = s.n_attackers
        if self.fixed is not None:
            sched, probs, (transfers, paymaster) = self.fixed, self.fixed_probs, self.fixed_rent
        else:
            sched = schedule_for(s, seed=trial_seed(self.master_seed, trial, STREAM_SCHEDULE))
            probs = self._probs(sched)
            transfers, paymaster = rental_flows(s, sched)
        rng = np.random.default_rng(trial_seed(self.master_seed, trial, STREAM_OUTCOME))
        u = rng.random((len(sched), 2))
        landed = (u[:, 0] < probs) & ~(u[:, 1] < d.virtual_bot_fraction)
        factors = [1.0 if hit else 0.0 for hit in landed]
        payouts, traffic = self._adaptive(sched)
        amounts = intrusion_amounts(s, sched, factors, payouts, traffic)

        intrusion = [0.0] * n
        for slot, amount in zip(sched.slots, amounts):
            intrusion[slot.attacker - 1] += amount
        charges = [0.0] * n
        last_rate: dict[int, float] = {}
        if d.renegotiation_cost > 0:
            for slot in sched.slots:
                if slot.is_diagonal:
                    continue
                rate = s.rents.rate(slot.landlord, slot.attacker)
                prev = last_rate.get(slot.attacker)
                if prev is not None and prev != rate:
                    charges[slot.attacker - 1] += d.renegotiation_cost
                last_rate[slot.attacker] = rate
        attackers = [transfers[k] + paymaster[k] + intrusion[k] - charges[k] for k in range(n)]
        income = self.income if traffic is self.traffic else target_income(s, traffic)
        target = income - sum(amounts)
        rent = [transfers[k] + paymaster[k] for k in range(n)]
        return [target] + attackers, intrusion, rent, charges, len(sched)


def _run_chunk(args):
    s, d, master_seed, start, stop = args
    runner = _TrialRunner(s, d, master_seed)
    rows = [runner.run(t) for t in range(start, stop)]
    return (
        np.array([r[0] for r in rows], dtype=float),
        np.array([r[1] for r in rows], dtype=float),
        np.array([r[2] for r in rows], dtype=float),
        np.array([r[3] for r in rows], dtype=float),
        np.array([r[4] for r in rows], dtype=np.int64),
    )


def player_names(s: Scenario, virtual: bool = False) -> tuple[str, ...]:
    names = ["target"] + [f"attacker_{i}" for i in range(1, s.n_attackers + 1)]
    if virtual:
        names[-1] = "virtual_attacker"
    return tuple(names)


def simulate_trials(s: Scenario, d: Optional[DefenseConfig] = None, trials: int = 1000,
                    master_seed: int = 0, workers: int = 1) -> TrialOutcomes:
    """Run ``trials`` independent realizations; ``workers > 1`` splits them across processes."""
    if trials < 1:
        raise ScenarioError("trials must be at least 1")
    d = d or DefenseConfig()
    eff = apply_virtual_attacker(s, d)
    if workers <= 1 or trials < 2:
        chunks = [_run_chunk((eff, d, master_seed, 0, trials))]
    else:
        bounds = np.linspace(0, trials, min(workers, trials) + 1).astype(int)
        jobs = [(eff, d, master_seed, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    parts = [np.concatenate([c[k] for c in chunks]) for k in range(5)]
    return TrialOutcomes(player_names(eff, d.virtual_attacker is not None), *parts)


@dataclass(frozen=True)
class PlayerStats:
    mean: float
    std: float
    q05: float
    q50: float
    q95: float
    prob_positive: float

    @classmethod
    def of(cls, x: np.ndarray) -> "PlayerStats":
        q05, q50, q95 = np.quantile(x, [0.05, 0.5, 0.95])
        return cls(
            mean=float(np.mean(x)),
            std=float(np.std(x, ddof=1)) if len(x) > 1 else 0.0,
            q05=float(q05),
            q50=float(q50),
            q95=float(q95),
            prob_positive=float(np.mean(x > 0)),
        )


@dataclass(frozen=True)
class SimulationSummary:
    """Distribution of realized rewards over the horizon.

    ``intrusion`` and ``rent`` hold per-attacker stats of the two income
    sources.  ``customer_reward`` uses the full ceiling C and
    ``customer_reward_realtime`` the on-line payout (they differ only under a
    payout split).
    """

    trials: int
    master_seed: int
    players: tuple[str, ...]
    reward: tuple[PlayerStats, ...]
    intrusion: tuple[PlayerStats, ...]
    rent: tuple[PlayerStats, ...]
    mean_attacks: float
    customer_reward: float
    customer_reward_realtime: float
    metadata: dict = field(default_factory=dict, compare=False)

    def stats(self, player: str) -> PlayerStats:
        return self.reward[self.players.index(player)]

    def attacker_means(self) -> np.ndarray:
        return np.array([p.mean for p in self.reward[1:]])

    def to_dict(self) -> dict:
        attackers = self.players[1:]
        return {
            "trials": self.trials,
            "master_seed": self.master_seed,
            "players": list(self.players),
            "reward": {p: vars(st) for p, st in zip(self.players, self.reward)},
            "intrusion": {p: vars(st) for p, st in zip(attackers, self.intrusion)},
            "rent": {p: vars(st) for p, st in zip(attackers, self.rent)},
            "mean_attacks": self.mean_attacks,
            "customer_reward": self.customer_reward,
            "customer_reward_realtime": self.customer_reward_realtime,
            "metadata": dict(self.metadata),
        }


def summarize(outcomes: TrialOutcomes, s: Scenario, d: DefenseConfig, master_seed: int) -> SimulationSummary:
    from .serialization import scenario_hash

    columns = lambda a: tuple(PlayerStats.of(a[:, k]) for k in range(a.shape[1]))
    realtime = d.payout_split.realtime if d.payout_split else s.C
    return SimulationSummary(
        trials=len(outcomes.reward),
        master_seed=master_seed,
        players=outcomes.players,
        reward=columns(outcomes.reward),
        intrusion=columns(outcomes.intrusion),
        rent=columns(outcomes.rent),
        mean_attacks=float(np.mean(outcomes.attacks)),
        customer_reward=reward_customer(s),
        customer_reward_realtime=reward_customer(s, payout=realtime),
        metadata={"scenario_hash": scenario_hash(s)},
    )


def run_monte_carlo(s: Scenario, d: Optional[DefenseConfig] = None, trials: int = 1000,
                    master_seed: int = 0, workers: int = 1) -> SimulationSummary:
    """Summary statistics of ``trials`` seeded realizations under defense ``d``."""
    d = d or DefenseConfig()
    outcomes = simulate_trials(s, d, trials, master_seed, workers)
    return summarize(outcomes, s, d, master_seed)


@dataclass(frozen=True)
class DefenseComparison:
    """Defended minus baseline, for the players present in both runs."""

    players: tuple[str, ...]
    baseline: SimulationSummary
    defended: SimulationSummary
    mean_delta: tuple[float, ...]
    prob_positive_delta: tuple[float, ...]
    intrusion_mean_delta: tuple[float, ...]

    def to_dict(self) -> dict:
        out = {
            "players": list(self.players),
            "mean_delta": dict(zip(self.players, self.mean_delta)),
            "prob_positive_delta": dict(zip(self.players, self.prob_positive_delta)),
            "intrusion_mean_delta": dict(zip(self.players[1:], self.intrusion_mean_delta)),
            "baseline": self.baseline.to_dict(),
            "defended": self.defended.to_dict(),
        }
        if "virtual_attacker" in self.defended.players:
            out["virtual_attacker_mean"] = self.defended.stats("virtual_attacker").mean
        return out


def evaluate_defense(s: Scenario, d: DefenseConfig, trials: int = 1000, master_seed: int = 0,
                     workers: int = 1) -> DefenseComparison:
    """Baseline and defended runs on the same master seed, and their differences."""
    base = run_monte_carlo(s, DefenseConfig(), trials, master_seed, workers)
    dfd = run_monte_carlo(s, d, trials, master_seed, workers)
    players = base.players
    k = len(players)
    return DefenseComparison(
        players=players,
        baseline=base,
        defended=dfd,
        mean_delta=tuple(dfd.reward[j].mean - base.reward[j].mean for j in range(k)),
        prob_positive_delta=tuple(dfd.reward[j].prob_positive - base.reward[j].prob_positive for j in range(k)),
        intrusion_mean_delta=tuple(dfd.intrusion[j].mean - base.intrusion[j].mean for j in range(k - 1)),
    )
