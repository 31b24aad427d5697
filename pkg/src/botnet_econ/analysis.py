"""Break-even conditions, attacker-count bounds and max-min / min-max attack durations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DegenerateAnalysisError, ScenarioError
from .rewards import expected_factors, intrusion_amounts, win_cost_per_customer_day
from .scenario import IntrusionCostMode, Scenario
from .schedule import AttackSchedule, build_uniform_schedule
from .search import grid_golden_search


@dataclass(frozen=True)
class BreakEvenResult:
    """Success probability attacker ``i`` needs to break even on the uniform schedule.

    ``required_success_probability`` is the raw ratio; it is negative when the
    attacker profits from rents alone and exceeds 1 when break-even is out
    of reach (``feasible`` is then False).
    """

    attacker: int
    required_success_probability: float
    net_rent_paid: float
    max_intrusion_income: float
    slack_vs_bound: float

    @property
    def feasible(self) -> bool:
        return self.slack_vs_bound >= 0

    def to_dict(self) -> dict:
        return {
            "attacker": self.attacker,
            "required_success_probability": self.required_success_probability,
            "feasible": self.feasible,
            "net_rent_paid": self.net_rent_paid,
            "max_intrusion_income": self.max_intrusion_income,
            "slack_vs_bound": self.slack_vs_bound,
        }


@dataclass(frozen=True)
class SaddleResult:
    attacker: int
    kind: str  # "max-min" | "min-max"
    optimizer_duration: float
    optimal_value: float
    search_trace: tuple[tuple[float, float], ...] = field(repr=False)

    def to_dict(self, include_trace: bool = False) -> dict:
        out = {
            "attacker": self.attacker,
            "kind": self.kind,
            "optimizer_duration": self.optimizer_duration,
            "optimal_value": self.optimal_value,
            "evaluations": len(self.search_trace),
        }
        if include_trace:
            out["search_trace"] = [list(p) for p in self.search_trace]
        return out


@dataclass(frozen=True)
class SearchSpec:
    """Closed duration interval [lower, upper] and grid size; ``upper=None`` means the horizon."""

    lower: float = 0.0
    upper: Optional[float] = None
    resolution: int = 1000

    def bounds(self, s: Scenario) -> tuple[float, float]:
        upper = s.horizon if self.upper is None else self.upper
        if self.resolution < 1:
            raise ScenarioError("search resolution must be at least 1")
        if not 0 <= self.lower <= upper or upper <= 0:
            raise ScenarioError(f"empty or invalid search interval [{self.lower}, {upper}]")
        if upper > s.horizon * (1 + 1e-12):
            raise ScenarioError(f"search interval upper end {upper} exceeds the horizon {s.horizon}")
        return self.lower, upper


def _uniform_context(i: int, s: Scenario):
    s.check_attacker(i)
    sched = build_uniform_schedule(s.n_attackers, s.horizon)
    dt = sched.slots[0].duration
    net_paid = dt * sum(s.rents.rate(j, i) - s.rents.rate(i, j) for j in range(1, s.n_attackers + 1))
    customers = sum(s.traffic.value(slot.end) for slot in sched.for_attacker(i))
    return net_paid, s.C * customers


def breakeven_success_prob(i: int, s: Scenario) -> BreakEvenResult:
    """Required success probability = net rent ``i`` pays / maximal intrusion income.

    Evaluated on the uniform schedule, where every slot of ``i`` has the same
    duration and hence the same success probability; the maximal intrusion
    income sums C * n(slot end) over those slots.
    """
    net_paid, max_income = _uniform_context(i, s)
    if max_income == 0:
        what = "C is zero" if s.C == 0 else "no customers at the end of any of its attacks"
        raise DegenerateAnalysisError(f"break-even probability for attacker {i} undefined: {what}")
    slack = max_income - net_paid
    required = net_paid / max_income
    if slack < 0 and required <= 1.0:
        # quotient rounded down onto 1; keep feasibility and the ratio consistent
        required = math.nextafter(1.0, 2.0)
    return BreakEvenResult(i, required, net_paid, max_income, slack)


def rent_bound_slack(i: int, s: Scenario) -> float:
    """Maximal intrusion income minus net rent paid; non-negative iff break-even is attainable."""
    net_paid, max_income = _uniform_context(i, s)
    return max_income - net_paid


def rent_ratio(rent_rate: float, C: float) -> float:
    """Daily rent level expressed in units of the payout ceiling C."""
    if C <= 0:
        raise ScenarioError(f"C must be positive, got {C}")
    return rent_rate / C


def min_attackers(rent_rate: float, C: float, horizon: float, n: float) -> int:
    """Smallest N >= 2 with N(N-1) >= (rent_rate / C) * (horizon / n).

    This is when a full day-rate ``rent_rate`` owed over one uniform slot
    still fits under the maximal intrusion income C * n.
    """
    if n <= 0:
        raise ScenarioError(f"customer count must be positive, got {n}")
    if rent_rate < 0:
        raise ScenarioError("rent rate must be non-negative")
    threshold = rent_ratio(rent_rate, C) * (horizon / n)
    # closed-form root as a starting guess, then settle exactly by enumeration
    N = max(2, math.floor((1 + math.sqrt(1 + 4 * threshold)) / 2) - 1)
    while N * (N - 1) < threshold:
        N += 1
    while N > 2 and (N - 1) * (N - 2) >= threshold:
        N -= 1
    return N


def breakeven_usagefee(s: Scenario, sched: AttackSchedule) -> float:
    """Usage fee at which the target's reward is exactly zero.

    The target's reward is affine in the fee: ``(fee - w) * V - L`` with
    customer volume V and intrusion loss L, so the root is ``w + L / V``.
    """
    sched.validate_for(s)
    volume = s.traffic.total()
    if volume == 0:
        raise DegenerateAnalysisError("break-even usage fee undefined: total customer volume is zero")
    if s.intrusion_cost_mode is IntrusionCostMode.EXPECTED:
        factors = expected_factors(s, sched)
    else:
        factors = [1.0] * len(sched)
    loss = sum(intrusion_amounts(s, sched, factors, [s.C] * len(sched)))
    return win_cost_per_customer_day(s) + loss / volume


def constant_traffic_saddle_value(i: int, s: Scenario, tau: float) -> float:
    """Constant-traffic attacker objective at attack duration ``tau``.

    rent-rate differential + p(i, tau) * C_min * n * N(N-1) / T
    """
    s.check_attacker(i)
    s.check_payout_constraint()
    if not s.traffic.is_constant:
        raise ScenarioError("constant-traffic objective needs a constant traffic profile")
    n = s.traffic.breakpoints[0][1]
    N = s.n_attackers
    return s.rents.differential(i) + s.curve(i)(tau) * s.C_min * n * N * (N - 1) / s.horizon


def saddle_objective(i: int, s: Scenario) -> Callable[[float], float]:
    """Attacker ``i``'s reward as a function of attack duration, payouts at the floor C_min.

    Constant traffic uses :func:`constant_traffic_saddle_value`.  Otherwise
    rents accrue over ``tau`` and customers are counted at ``t_i + tau``
    (capped at the horizon), ``t_i`` being ``i``'s first uniform-schedule start.
    """
    s.check_attacker(i)
    s.check_payout_constraint()
    if s.traffic.is_constant:
        return lambda tau: constant_traffic_saddle_value(i, s, tau)
    if s.n_attackers >= 2:
        start = build_uniform_schedule(s.n_attackers, s.horizon).for_attacker(i)[0].start
    else:
        start = 0.0
    diff = s.rents.differential(i)
    curve = s.curve(i)

    def objective(tau):
        return diff * tau + curve(tau) * s.C_min * s.traffic.value(min(start + tau, s.horizon))

    return objective


def objective_breaks(i: int, s: Scenario) -> list[float]:
    """Durations where the saddle objective may kink or jump.

    Traffic changes seen from ``i``'s first start, plus the knots of a
    tabulated learning curve.  Between consecutive breaks the objective is
    smooth.
    """
    out = []
    curve = s.curve(i)
    if curve.table is not None:
        out.extend(t for t, _ in curve.table)
    if not s.traffic.is_constant:
        start = build_uniform_schedule(s.n_attackers, s.horizon).for_attacker(i)[0].start if s.n_attackers >= 2 else 0.0
        out.extend(t - start for t, _ in s.traffic.breakpoints if t > start)
    return sorted(set(out))


def _saddle(i, s, search, maximize):
    search = search or SearchSpec()
    lower, upper = search.bounds(s)
    f = saddle_objective(i, s)
    x, _, trace = grid_golden_search(f, lower, upper, search.resolution, maximize=maximize,
                                     breaks=objective_breaks(i, s))
    return SaddleResult(i, "max-min" if maximize else "min-max", x, f(x), tuple(trace))


def maxmin_attacker(i: int, s: Scenario, search: Optional[SearchSpec] = None) -> SaddleResult:
    """Attack duration maximizing attacker ``i``'s reward when the target sets C = C_min."""
    return _saddle(i, s, search, maximize=True)


def minmax_attacker(i: int, s: Scenario, search: Optional[SearchSpec] = None) -> SaddleResult:
    """Attack duration minimizing the same objective: the attacker's guaranteed floor."""
    return _saddle(i, s, search, maximize=False)
