"""Attack schedules: who holds the single access channel, when, and for how long."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional

import numpy as np

from .errors import ScenarioError
from .scenario import TIME_TOL, DurationLaw, MarkovSpec, Scenario


@dataclass(frozen=True)
class Slot:
    """One attack: ``attacker`` rents access from ``landlord`` for ``duration`` days.

    ``landlord == attacker`` marks a slot with no rental counterpart (own or
    paymaster-funded access).
    """

    attacker: int
    start: float
    duration: float
    landlord: int

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def is_diagonal(self) -> bool:
        return self.landlord == self.attacker


@dataclass(frozen=True)
class AttackSchedule:
    slots: tuple[Slot, ...]
    horizon: float

    def __post_init__(self):
        slots = tuple(self.slots)
        object.__setattr__(self, "slots", slots)
        slack = TIME_TOL * self.horizon
        prev_end = 0.0
        for s in slots:
            if s.duration <= 0:
                raise ScenarioError(f"slot durations must be positive: {s}")
            if s.start < 0 or s.end > self.horizon + slack:
                raise ScenarioError(f"slot {s} lies outside [0, {self.horizon}]")
            if s.start < prev_end - slack:
                raise ScenarioError(f"slot {s} overlaps its predecessor")
            prev_end = s.end

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    def for_attacker(self, i: int) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.attacker == i)

    def validate_for(self, scenario: Scenario) -> None:
        if self.horizon != scenario.horizon:
            raise ScenarioError("schedule horizon differs from scenario horizon")
        for s in self.slots:
            scenario.check_attacker(s.attacker)
            scenario.check_attacker(s.landlord)


def build_uniform_schedule(n_attackers: int, horizon: float) -> AttackSchedule:
    """Equal-duration round robin over every ordered (tenant, landlord) pair.

    ``N(N-1)`` back-to-back slots of ``horizon / (N(N-1))`` days, pairs in
    lexicographic order.
    """
    if n_attackers < 2:
        raise ScenarioError("uniform schedule requires at least two attackers")
    if not horizon > 0:
        raise ScenarioError(f"horizon must be positive, got {horizon}")
    pairs = list(permutations(range(1, n_attackers + 1), 2))
    count = len(pairs)
    dt = horizon / count
    slots = tuple(
        Slot(attacker=tenant, start=horizon * k / count, duration=dt, landlord=landlord)
        for k, (tenant, landlord) in enumerate(pairs)
    )
    return AttackSchedule(slots, horizon)


def _draw(rng: np.random.Generator, weights) -> int:
    cum = np.cumsum(weights, dtype=float)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def build_markov_schedule(scenario: Scenario, kernel, duration_law: Optional[DurationLaw] = None,
                          seed=None, initial=None) -> AttackSchedule:
    """Sample an attack rotation from a Markov chain over {idle, 1..N}.

    The chain is stepped from time 0, each visit lasting a fixed or
    exponentially distributed time; idle visits leave gaps and the final visit
    is cut at the horizon.  Access is granted by whoever held it last, so a
    slot's landlord is the previous attacking tenant; the first attack, and an
    attacker following itself, get a diagonal slot.
    """
    if isinstance(kernel, MarkovSpec):
        spec = kernel
    else:
        spec = MarkovSpec(kernel=tuple(tuple(r) for r in kernel),
                          duration_law=duration_law or DurationLaw(),
                          initial=None if initial is None else tuple(initial))
    if spec.n_attackers != scenario.n_attackers:
        raise ScenarioError("Markov kernel size does not match n_attackers")
    rng = np.random.default_rng(seed)
    horizon = scenario.horizon
    law = spec.duration_law
    state = _draw(rng, spec.initial if spec.initial is not None else spec.kernel[0])
    t = 0.0
    holder = None
    slots = []
    while horizon - t > TIME_TOL * horizon:
        length = law.mean if law.kind == "fixed" else rng.exponential(law.mean)
        end = min(t + length, horizon)
        if state != 0 and end > t:
            landlord = holder if holder is not None else state
            slots.append(Slot(attacker=state, start=t, duration=end - t, landlord=landlord))
            holder = state
        t = end
        state = _draw(rng, spec.kernel[state])
    return AttackSchedule(tuple(slots), horizon)


def schedule_for(scenario: Scenario, seed=None) -> AttackSchedule:
    """The scenario's own schedule: uniform, or Markov sampled with ``seed``."""
    if scenario.schedule is None:
        return build_uniform_schedule(scenario.n_attackers, scenario.horizon)
    return build_markov_schedule(scenario, scenario.schedule, seed=seed)
