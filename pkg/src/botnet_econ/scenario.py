"""Domain types for one instance of the botnet rental-market game.

Units throughout: time in days, money in USD.  Attackers are numbered
``1..N``; the target is player 0.

Rent convention: ``RentMatrix.rate(i, j)`` is the per-day rent that attacker
``i`` (the landlord granting access) receives from attacker ``j`` (the tenant).
Diagonal entries ``rate(i, i)`` are paymaster payments to ``i``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ConstraintError, ScenarioError

Money = float
Duration = float
TimePoint = float
Probability = float

# slack for float round-off when checking times against the horizon
TIME_TOL = 1e-9


def _finite(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ScenarioError(f"{name} must be finite, got {value}")
    return value


def _probability(name: str, value) -> float:
    value = _finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise ScenarioError(f"{name} must lie in [0, 1], got {value}")
    return value


class TargetCostMode(str, Enum):
    """How the customer-win cost enters the target's income term."""

    AS_WRITTEN = "as-written"  # (usagefee - p_win) * volume
    CONSISTENT = "consistent"  # (usagefee - p_win * C) * volume


class IntrusionCostMode(str, Enum):
    """Whether the target is charged the full ceiling per attack or its expectation."""

    WORST_CASE = "worst-case"
    EXPECTED = "expected"


@dataclass(frozen=True)
class TrafficProfile:
    """Piecewise-constant customer count n(t) on [0, horizon].

    ``breakpoints`` holds ``(start, count)`` pairs; each count holds until the
    next start.  Evaluation is right-continuous: at a breakpoint the new
    segment's count applies.
    """

    breakpoints: tuple[tuple[float, float], ...]
    horizon: float

    def __post_init__(self):
        horizon = _finite("traffic horizon", self.horizon)
        if horizon <= 0:
            raise ScenarioError(f"horizon must be positive, got {horizon}")
        points = tuple(
            (_finite("traffic time", t), _finite("traffic count", n)) for t, n in self.breakpoints
        )
        if not points:
            raise ScenarioError("traffic profile needs at least one breakpoint")
        if points[0][0] != 0.0:
            raise ScenarioError(f"first traffic breakpoint must be at time 0, got {points[0][0]}")
        for (t0, _), (t1, _) in zip(points, points[1:]):
            if t1 <= t0:
                raise ScenarioError(f"traffic breakpoints must be strictly increasing ({t0} then {t1})")
        if points[-1][0] >= horizon:
            raise ScenarioError(f"traffic breakpoint {points[-1][0]} lies at or beyond the horizon {horizon}")
        for _, n in points:
            if n < 0:
                raise ScenarioError(f"customer counts must be non-negative, got {n}")
        object.__setattr__(self, "breakpoints", points)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "_times", [t for t, _ in points])

    @classmethod
    def constant(cls, count: float, horizon: float) -> "TrafficProfile":
        return cls(((0.0, count),), horizon)

    @property
    def is_constant(self) -> bool:
        return len({n for _, n in self.breakpoints}) == 1

    def value(self, t: TimePoint) -> float:
        """n(t). Times up to a hair past the horizon map onto the last segment."""
        if t < 0 or t > self.horizon * (1 + TIME_TOL):
            raise ScenarioError(f"time {t} outside [0, {self.horizon}]")
        return self.breakpoints[bisect_right(self._times, t) - 1][1]

    def segments(self) -> Iterator[tuple[float, float, float]]:
        """Yield ``(start, end, count)`` for each segment."""
        ends = self._times[1:] + [self.horizon]
        for (start, count), end in zip(self.breakpoints, ends):
            yield start, end, count

    def integrate(self, a: TimePoint, b: TimePoint) -> float:
        """Exact integral of n(t) over [a, b] in customer-days."""
        if not 0.0 <= a <= b <= self.horizon:
            raise ScenarioError(f"integration interval [{a}, {b}] not within [0, {self.horizon}]")
        total = 0.0
        for start, end, count in self.segments():
            lo, hi = max(start, a), min(end, b)
            if hi > lo:
                total += count * (hi - lo)
        return total

    def total(self) -> float:
        return self.integrate(0.0, self.horizon)

    def mean(self) -> float:
        return self.total() / self.horizon

    def with_horizon(self, horizon: float) -> "TrafficProfile":
        """Same breakpoints on a new horizon (points at or past it are dropped)."""
        return TrafficProfile(tuple(p for p in self.breakpoints if p[0] < horizon), horizon)


@dataclass(frozen=True)
class RentMatrix:
    """Per-day rent rates; ``rates[i-1][j-1]`` is paid by tenant j to landlord i."""

    rates: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_finite("rent rate", r) for r in row) for row in self.rates)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ScenarioError("rent matrix must be square and non-empty")
        if any(r < 0 for row in rows for r in row):
            raise ScenarioError("rent rates must be non-negative")
        object.__setattr__(self, "rates", rows)

    @classmethod
    def uniform(cls, n: int, rate: float, diagonal: float = 0.0) -> "RentMatrix":
        return cls(tuple(tuple(diagonal if i == j else rate for j in range(n)) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.rates)

    def rate(self, landlord: int, tenant: int) -> float:
        return self.rates[landlord - 1][tenant - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.rates, dtype=float)

    def differential(self, i: int) -> float:
        """Net per-day rent flowing to ``i``: sum over j of rate(i, j) - rate(j, i)."""
        return sum(self.rate(i, j) - self.rate(j, i) for j in range(1, self.size + 1))

    def max_off_diagonal(self) -> float:
        n = self.size
        return max((self.rates[i][j] for i in range(n) for j in range(n) if i != j), default=0.0)


@dataclass(frozen=True)
class LearningCurve:
    """Success probability p(t) of an intrusion after attacking for t days.

    Either parametric, ``1 - exp(-t / alpha)``, or tabulated as ascending
    ``(t, p)`` pairs with linear interpolation, an implicit ``(0, 0)`` start,
    and clamping to the last value.
    """

    alpha: Optional[float] = None
    table: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if (self.alpha is None) == (self.table is None):
            raise ScenarioError("learning curve needs exactly one of alpha or table")
        if self.alpha is not None:
            alpha = _finite("alpha", self.alpha)
            if alpha <= 0:
                raise ScenarioError(f"alpha must be positive, got {alpha}")
            object.__setattr__(self, "alpha", alpha)
            return
        points = tuple((_finite("curve time", t), _probability("curve probability", p)) for t, p in self.table)
        if not points:
            raise ScenarioError("tabulated learning curve is empty")
        if points[0][0] < 0:
            raise ScenarioError("learning curve times must be non-negative")
        if points[0][0] == 0 and points[0][1] != 0:
            raise ScenarioError("learning curve must start at p(0) = 0")
        for (t0, p0), (t1, p1) in zip(points, points[1:]):
            if t1 <= t0:
                raise ScenarioError("learning curve times must be strictly increasing")
            if p1 < p0:
                raise ScenarioError("learning curve must be non-decreasing")
        object.__setattr__(self, "table", points)
        if points[0][0] > 0:
            points = ((0.0, 0.0),) + points
        object.__setattr__(self, "_ts", np.array([t for t, _ in points]))
        object.__setattr__(self, "_ps", np.array([p for _, p in points]))

    @classmethod
    def exponential(cls, alpha: float) -> "LearningCurve":
        return cls(alpha=alpha)

    @classmethod
    def tabulated(cls, points: Sequence[Sequence[float]]) -> "LearningCurve":
        return cls(table=tuple((t, p) for t, p in points))

    @classmethod
    def step(cls, level: float, onset: float = 1e-12) -> "LearningCurve":
        """p = level for every duration >= onset (p(0) stays 0)."""
        if level == 0:
            return cls.zero()
        return cls(table=((0.0, 0.0), (onset, level)))

    @classmethod
    def zero(cls) -> "LearningCurve":
        return cls(table=((0.0, 0.0),))

    def __call__(self, t: Duration) -> Probability:
        if t < 0:
            raise ScenarioError(f"learning curve evaluated at negative time {t}")
        if self.alpha is not None:
            return -math.expm1(-t / self.alpha)
        return float(np.interp(t, self._ts, self._ps))

    def to_json(self):
        if self.alpha is not None:
            return self.alpha
        return [list(p) for p in self.table]


@dataclass(frozen=True)
class DurationLaw:
    kind: str = "fixed"  # "fixed" | "exponential"
    mean: Duration = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "exponential"):
            raise ScenarioError(f"unknown duration law {self.kind!r}")
        mean = _finite("mean duration", self.mean)
        if mean <= 0:
            raise ScenarioError(f"mean duration must be positive, got {mean}")
        object.__setattr__(self, "mean", mean)


@dataclass(frozen=True)
class MarkovSpec:
    """Attack rotation chain over states ``0 = idle, 1..N`` (attacker tenant).

    ``initial`` weights pick the state active at time 0; when omitted the
    idle row of the kernel is used.
    """

    kernel: tuple[tuple[float, ...], ...]
    duration_law: DurationLaw = field(default_factory=DurationLaw)
    initial: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        rows = tuple(tuple(_finite("kernel weight", w) for w in row) for row in self.kernel)
        k = len(rows)
        if k < 2 or any(len(row) != k for row in rows):
            raise ScenarioError("Markov kernel must be square over {idle, 1..N}")
        for s, row in enumerate(rows):
            _check_weights(row, f"kernel row {s}")
        object.__setattr__(self, "kernel", rows)
        if self.initial is not None:
            initial = tuple(_finite("initial weight", w) for w in self.initial)
            if len(initial) != k:
                raise ScenarioError("initial weights must cover every chain state")
            _check_weights(initial, "initial weights")
            object.__setattr__(self, "initial", initial)

    @property
    def n_attackers(self) -> int:
        return len(self.kernel) - 1


def _check_weights(row, what):
    if any(w < 0 for w in row):
        raise ScenarioError(f"{what} has a negative weight")
    if sum(row) <= 0:
        raise ScenarioError(f"{what} has zero total weight")


@dataclass(frozen=True)
class Scenario:
    """Full parameterization of one game instance.

    ``schedule`` is ``None`` for the equal-duration round-robin schedule, or a
    :class:`MarkovSpec` for stochastic rotation.
    """

    n_attackers: int
    horizon: Duration
    C: Money
    C_min: Money
    usagefee: Money
    usagefee_max: Money
    p_win: Probability
    traffic: TrafficProfile
    rents: RentMatrix
    curves: tuple[LearningCurve, ...]
    target_cost_mode: TargetCostMode = TargetCostMode.AS_WRITTEN
    intrusion_cost_mode: IntrusionCostMode = IntrusionCostMode.WORST_CASE
    schedule: Optional[MarkovSpec] = None

    def __post_init__(self):
        if isinstance(self.n_attackers, bool) or not isinstance(self.n_attackers, (int, np.integer)):
            raise ScenarioError(f"n_attackers must be an integer, got {self.n_attackers!r}")
        if self.n_attackers < 1:
            raise ScenarioError("need at least one attacker")
        for name in ("horizon", "C", "C_min", "usagefee", "usagefee_max"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        object.__setattr__(self, "p_win", _probability("p_win", self.p_win))
        if self.horizon <= 0:
            raise ScenarioError("horizon must be positive")
        if self.C < 0:
            raise ScenarioError("C must be non-negative")
        if self.usagefee < 0:
            raise ScenarioError("usagefee must be non-negative")
        if self.traffic.horizon != self.horizon:
            raise ScenarioError(
                f"traffic horizon {self.traffic.horizon} differs from scenario horizon {self.horizon}"
            )
        if self.rents.size != self.n_attackers:
            raise ScenarioError(f"rent matrix is {self.rents.size}x{self.rents.size}, expected N={self.n_attackers}")
        curves = tuple(self.curves)
        if len(curves) != self.n_attackers:
            raise ScenarioError(f"need {self.n_attackers} learning curves, got {len(curves)}")
        object.__setattr__(self, "curves", curves)
        try:
            object.__setattr__(self, "target_cost_mode", TargetCostMode(self.target_cost_mode))
            object.__setattr__(self, "intrusion_cost_mode", IntrusionCostMode(self.intrusion_cost_mode))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        if self.schedule is not None and self.schedule.n_attackers != self.n_attackers:
            raise ScenarioError("Markov kernel size does not match n_attackers")

    def curve(self, i: int) -> LearningCurve:
        self.check_attacker(i)
        return self.curves[i - 1]

    def check_attacker(self, i: int) -> None:
        if not 1 <= i <= self.n_attackers:
            raise ScenarioError(f"attacker id {i} out of range 1..{self.n_attackers}")

    def check_payout_constraint(self) -> None:
        """Raise unless C_min >= usagefee_max >= 0."""
        if not self.C_min >= self.usagefee_max >= 0:
            raise ConstraintError(
                f"payout constraint C_min >= usagefee_max >= 0 violated "
                f"(C_min={self.C_min}, usagefee_max={self.usagefee_max})"
            )

    def replace(self, **changes) -> "Scenario":
        if "horizon" in changes and "traffic" not in changes:
            changes["traffic"] = self.traffic.with_horizon(changes["horizon"])
        return replace(self, **changes)
