"""Economic defenses available to the target.

Each defense is a plain config object; :mod:`botnet_econ.simulation` applies
them per trial.  The two scenario-level transforms live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ScenarioError
from .serialization import _check_keys, read_json
from .scenario import LearningCurve, MarkovSpec, RentMatrix, Scenario, TrafficProfile, _finite, _probability


@dataclass(frozen=True)
class VirtualAttacker:
    """Defender-run attacker advertising rents to every real attacker.

    ``charge``: per-day rent it takes from each real tenant.
    ``pay``: per-day rent it pays each real landlord.
    Scalars apply to all real attackers.
    """

    charge: Union[float, tuple[float, ...]] = 0.0
    pay: Union[float, tuple[float, ...]] = 0.0

    def rates(self, n: int, which: str) -> list[float]:
        value = getattr(self, which)
        if isinstance(value, (int, float)):
            out = [float(value)] * n
        else:
            out = [float(v) for v in value]
        if len(out) != n:
            raise ScenarioError(f"virtual attacker {which} list has {len(out)} entries, expected {n}")
        if any(v < 0 for v in out):
            raise ScenarioError("advertised rents must be non-negative")
        return out


@dataclass(frozen=True)
class Buffering:
    window: float
    duty: float

    def __post_init__(self):
        if not _finite("buffer window", self.window) > 0:
            raise ScenarioError("buffer window must be positive")
        if not 0 < _probability("buffer duty", self.duty):
            raise ScenarioError("buffer duty cycle must be positive")


@dataclass(frozen=True)
class PayoutSplit:
    """Real-time payout ceiling exposed on line; the full ceiling is paid later via the bank."""

    realtime: float
    deferred: float

    def __post_init__(self):
        if not 0 <= _finite("realtime payout", self.realtime) <= _finite("deferred payout", self.deferred):
            raise ScenarioError("payout split needs 0 <= realtime <= deferred")


@dataclass(frozen=True)
class AdaptivePolicy:
    """React to the attack count observed in the previous window.

    When at least ``attack_threshold`` attacks started in window k-1, window k
    pays out ``cmin_multiplier`` times the on-line ceiling and, if
    ``buffer_duty`` is set, buffers that window's traffic.
    """

    window: float
    attack_threshold: int
    cmin_multiplier: float = 1.0
    buffer_duty: Optional[float] = None

    def __post_init__(self):
        if not _finite("policy window", self.window) > 0:
            raise ScenarioError("policy window must be positive")
        if self.attack_threshold < 0:
            raise ScenarioError("attack threshold must be non-negative")
        if _finite("cmin multiplier", self.cmin_multiplier) < 0:
            raise ScenarioError("cmin multiplier must be non-negative")
        if self.buffer_duty is not None and not 0 < _probability("buffer duty", self.buffer_duty):
            raise ScenarioError("buffer duty cycle must be positive")


@dataclass(frozen=True)
class DefenseConfig:
    virtual_bot_fraction: float = 0.0
    virtual_attacker: Optional[VirtualAttacker] = None
    buffering: Optional[Buffering] = None
    renegotiation_cost: float = 0.0
    payout_split: Optional[PayoutSplit] = None
    adaptive_policy: Optional[AdaptivePolicy] = None

    def __post_init__(self):
        _probability("virtual_bot_fraction", self.virtual_bot_fraction)
        if _finite("renegotiation_cost", self.renegotiation_cost) < 0:
            raise ScenarioError("renegotiation cost must be non-negative")


def buffer_traffic(profile: TrafficProfile, window: float, duty: float) -> TrafficProfile:
    """Hold each window's arrivals and serve them in the window's final ``duty`` fraction.

    The volume of every window (the last may be partial) is preserved.  A
    duty cycle of 1 means no buffering and returns the profile unchanged.
    """
    if not duty > 0:
        raise ScenarioError("buffer duty cycle must be positive")
    if duty > 1:
        raise ScenarioError("buffer duty cycle cannot exceed 1")
    if not window > 0:
        raise ScenarioError("buffer window must be positive")
    if duty == 1:
        return profile
    T = profile.horizon
    points = []
    k = 0
    while True:
        start = k * window
        if start >= T:
            break
        end = min((k + 1) * window, T)
        burst = start + (1 - duty) * (end - start)
        volume = profile.integrate(start, end)
        if burst > start:
            points.append((start, 0.0))
        if end > burst:
            points.append((burst, volume / (end - burst)))
        k += 1
    merged = []
    for t, n in points:
        if merged and merged[-1][1] == n:
            continue
        merged.append((t, n))
    return TrafficProfile(tuple(merged), T)


def apply_virtual_attacker(s: Scenario, va: Union[VirtualAttacker, DefenseConfig]) -> Scenario:
    """Add a defender-controlled attacker N+1 that rents but never intrudes.

    Its row of the rent matrix holds the advertised ``charge`` and its column
    the advertised ``pay``; it gets a zero learning curve.  For Markov
    rotation the new state is entered with the mean weight of the real
    attackers in each row and leaves like an average real attacker.
    """
    if isinstance(va, DefenseConfig):
        va = va.virtual_attacker
    if va is None:
        return s
    n = s.n_attackers
    charge = va.rates(n, "charge")
    pay = va.rates(n, "pay")
    rates = [list(row) + [pay[i]] for i, row in enumerate(s.rents.rates)]
    rates.append(charge + [0.0])
    schedule = s.schedule
    if schedule is not None:
        schedule = _extend_kernel(schedule)
    return s.replace(
        n_attackers=n + 1,
        rents=RentMatrix(tuple(tuple(r) for r in rates)),
        curves=s.curves + (LearningCurve.zero(),),
        schedule=schedule,
    )


def _extend_kernel(spec: MarkovSpec) -> MarkovSpec:
    K = np.array(spec.kernel, dtype=float)
    col = K[:, 1:].mean(axis=1, keepdims=True)
    K = np.hstack([K, col])
    row = K[1:].mean(axis=0, keepdims=True)
    K = np.vstack([K, row])
    initial = spec.initial
    if initial is not None:
        initial = tuple(initial) + (float(np.mean(initial[1:])),)
    return MarkovSpec(tuple(map(tuple, K.tolist())), spec.duration_law, initial)


DEFENSE_KEYS = (
    "virtual_bot_fraction", "virtual_attacker", "buffering",
    "renegotiation_cost", "payout_split", "adaptive_policy",
)


def _sub(doc, key, cls, allowed):
    value = doc.get(key)
    if value is None:
        return None
    _check_keys(value, allowed, where=f"defense.{key}")
    value = {k: tuple(v) if isinstance(v, list) else v for k, v in value.items()}
    try:
        return cls(**value)
    except TypeError as exc:
        raise ScenarioError(f"defense.{key}: {exc}") from None


def defense_from_dict(doc: dict) -> DefenseConfig:
    """Build a DefenseConfig from its JSON form; unknown keys are rejected."""
    _check_keys(doc, DEFENSE_KEYS, where="defense")
    return DefenseConfig(
        virtual_bot_fraction=doc.get("virtual_bot_fraction", 0.0),
        virtual_attacker=_sub(doc, "virtual_attacker", VirtualAttacker, ("charge", "pay")),
        buffering=_sub(doc, "buffering", Buffering, ("window", "duty")),
        renegotiation_cost=doc.get("renegotiation_cost", 0.0),
        payout_split=_sub(doc, "payout_split", PayoutSplit, ("realtime", "deferred")),
        adaptive_policy=_sub(doc, "adaptive_policy", AdaptivePolicy,
                             ("window", "attack_threshold", "cmin_multiplier", "buffer_duty")),
    )


def defense_to_dict(d: DefenseConfig) -> dict:
    def plain(obj):
        if obj is None:
            return None
        return {k: list(v) if isinstance(v, tuple) else v for k, v in vars(obj).items()}

    return {
        "virtual_bot_fraction": d.virtual_bot_fraction,
        "virtual_attacker": plain(d.virtual_attacker),
        "buffering": plain(d.buffering),
        "renegotiation_cost": d.renegotiation_cost,
        "payout_split": plain(d.payout_split),
        "adaptive_policy": plain(d.adaptive_policy),
    }


def load_defense(path) -> DefenseConfig:
    return defense_from_dict(read_json(path))
