"""Strict JSON schema for scenario and defense files."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from .errors import ScenarioError
from .scenario import (
    DurationLaw,
    IntrusionCostMode,
    LearningCurve,
    MarkovSpec,
    RentMatrix,
    Scenario,
    TargetCostMode,
    TrafficProfile,
)

SCENARIO_KEYS = (
    "n_attackers", "horizon_days", "C", "C_min", "usagefee", "usagefee_max",
    "p_win", "traffic", "rents", "alphas", "modes",
)
REQUIRED_SCENARIO_KEYS = SCENARIO_KEYS[:-1]
MODE_KEYS = ("target_cost", "intrusion_cost", "schedule")
MARKOV_KEYS = ("kind", "kernel", "duration_law", "mean_duration", "initial")


def _check_keys(doc, allowed, required=(), where="scenario"):
    if not isinstance(doc, dict):
        raise ScenarioError(f"{where} must be a JSON object")
    unknown = [k for k in doc if k not in allowed]
    if unknown:
        raise ScenarioError(f"unknown key {unknown[0]!r} in {where} (allowed: {', '.join(allowed)})")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ScenarioError(f"missing key {missing[0]!r} in {where}")


def _curve_from_json(value) -> LearningCurve:
    if isinstance(value, list):
        return LearningCurve.tabulated(value)
    return LearningCurve.exponential(value)


def _markov_from_json(doc) -> MarkovSpec:
    _check_keys(doc, MARKOV_KEYS, ("kind", "kernel"), where="modes.schedule")
    if doc["kind"] != "markov":
        raise ScenarioError(f"unknown schedule kind {doc['kind']!r}")
    law = DurationLaw(doc.get("duration_law", "fixed"), doc.get("mean_duration", 1.0))
    initial = doc.get("initial")
    return MarkovSpec(
        kernel=tuple(tuple(row) for row in doc["kernel"]),
        duration_law=law,
        initial=None if initial is None else tuple(initial),
    )


def scenario_from_dict(doc: dict) -> Scenario:
    _check_keys(doc, SCENARIO_KEYS, REQUIRED_SCENARIO_KEYS)
    modes = doc.get("modes", {})
    _check_keys(modes, MODE_KEYS, where="modes")
    schedule = modes.get("schedule", "uniform")
    if schedule == "uniform":
        markov = None
    elif isinstance(schedule, dict):
        markov = _markov_from_json(schedule)
    else:
        raise ScenarioError(f"modes.schedule must be 'uniform' or a Markov object, got {schedule!r}")
    horizon = doc["horizon_days"]
    try:
        traffic = TrafficProfile(tuple((t, n) for t, n in doc["traffic"]), horizon)
        rents = RentMatrix(tuple(tuple(row) for row in doc["rents"]))
        curves = tuple(_curve_from_json(a) for a in doc["alphas"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"malformed scenario field: {exc}") from None
    return Scenario(
        n_attackers=doc["n_attackers"],
        horizon=horizon,
        C=doc["C"],
        C_min=doc["C_min"],
        usagefee=doc["usagefee"],
        usagefee_max=doc["usagefee_max"],
        p_win=doc["p_win"],
        traffic=traffic,
        rents=rents,
        curves=curves,
        target_cost_mode=modes.get("target_cost", TargetCostMode.AS_WRITTEN.value),
        intrusion_cost_mode=modes.get("intrusion_cost", IntrusionCostMode.WORST_CASE.value),
        schedule=markov,
    )


def scenario_to_dict(s: Scenario) -> dict:
    if s.schedule is None:
        schedule = "uniform"
    else:
        schedule = {
            "kind": "markov",
            "kernel": [list(row) for row in s.schedule.kernel],
            "duration_law": s.schedule.duration_law.kind,
            "mean_duration": s.schedule.duration_law.mean,
        }
        if s.schedule.initial is not None:
            schedule["initial"] = list(s.schedule.initial)
    return {
        "n_attackers": int(s.n_attackers),
        "horizon_days": s.horizon,
        "C": s.C,
        "C_min": s.C_min,
        "usagefee": s.usagefee,
        "usagefee_max": s.usagefee_max,
        "p_win": s.p_win,
        "traffic": [list(p) for p in s.traffic.breakpoints],
        "rents": [list(row) for row in s.rents.rates],
        "alphas": [c.to_json() for c in s.curves],
        "modes": {
            "target_cost": s.target_cost_mode.value,
            "intrusion_cost": s.intrusion_cost_mode.value,
            "schedule": schedule,
        },
    }


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def scenario_hash(s: Scenario) -> str:
    return hashlib.sha256(canonical_json(scenario_to_dict(s)).encode()).hexdigest()


def read_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    return scenario_from_dict(read_json(path))


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n", encoding="utf-8")


def builtin_scenario_names() -> list[str]:
    root = resources.files("botnet_econ") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def builtin_scenario(name: str) -> Scenario:
    """Load one of the scenarios shipped with the package (see ``builtin_scenario_names``)."""
    ref = resources.files("botnet_econ") / "scenarios" / f"{name}.json"
    if not ref.is_file():
        raise ScenarioError(f"no built-in scenario {name!r}; choose from {builtin_scenario_names()}")
    with resources.as_file(ref) as path:
        return load_scenario(path)
