"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 infeasible analysis.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from importlib import resources

import numpy as np

from . import __version__
from .analysis import (
    SearchSpec,
    breakeven_success_prob,
    breakeven_usagefee,
    maxmin_attacker,
    min_attackers,
    minmax_attacker,
    rent_bound_slack,
    rent_ratio,
)
from .defense import DefenseConfig, apply_virtual_attacker, defense_to_dict, load_defense
from .errors import DegenerateAnalysisError, ScenarioError
from .reporting import (
    ANALYSIS_HEADER,
    COMPARISON_HEADER,
    SUMMARY_HEADER,
    SWEEP_HEADER,
    comparison_rows,
    summary_rows,
    to_csv,
    to_json,
)
from .rewards import reward_report
from .schedule import schedule_for
from .serialization import builtin_scenario, load_scenario, scenario_hash
from .simulation import evaluate_defense, run_monte_carlo

DEFAULT_SEED = 20100101
DEFAULT_TRIALS = 1000
TOOL = "botnet-econ"

SCENARIO_SWEEP_FIELDS = {
    "C": "C",
    "C_min": "C_min",
    "usagefee": "usagefee",
    "usagefee_max": "usagefee_max",
    "p_win": "p_win",
    "horizon_days": "horizon",
}
DEFENSE_SWEEP_FIELDS = ("virtual_bot_fraction", "renegotiation_cost")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def resolve_scenario(ref: str):
    """A scenario file path, or ``builtin:<name>`` for a shipped scenario."""
    if ref.startswith("builtin:"):
        return builtin_scenario(ref[len("builtin:"):])
    return load_scenario(ref)


def resolve_defense(ref):
    if ref is None:
        return DefenseConfig()
    if ref.startswith("builtin:"):
        res = resources.files("botnet_econ") / "defenses" / f"{ref[len('builtin:'):]}.json"
        if not res.is_file():
            raise ScenarioError(f"no built-in defense {ref!r}")
        with resources.as_file(res) as path:
            return load_defense(path)
    return load_defense(ref)


def parse_sweep(text: str):
    """``path=start:stop:steps`` or ``path=v1,v2,...`` -> (path, values)."""
    if "=" not in text:
        raise UsageError(f"sweep must look like param=start:stop:steps, got {text!r}")
    path, spec = text.split("=", 1)
    section, _, name = path.partition(".")
    if not ((section == "scenario" and name in SCENARIO_SWEEP_FIELDS)
            or (section == "defense" and name in DEFENSE_SWEEP_FIELDS)):
        allowed = [f"scenario.{k}" for k in SCENARIO_SWEEP_FIELDS] + [f"defense.{k}" for k in DEFENSE_SWEEP_FIELDS]
        raise UsageError(f"unknown sweep parameter {path!r}; choose from {', '.join(allowed)}")
    try:
        if ":" in spec:
            start, stop, steps = spec.split(":")
            steps = int(steps)
            if steps < 1:
                raise UsageError("sweep steps must be at least 1")
            values = [float(v) for v in np.linspace(float(start), float(stop), steps)]
        else:
            values = [float(v) for v in spec.split(",")]
    except ValueError:
        raise UsageError(f"malformed sweep values {spec!r}") from None
    return path, values


def _header(command, s, seed, extra=None):
    doc = {"tool": TOOL, "version": __version__, "command": command,
           "scenario_hash": scenario_hash(s), "seed": seed}
    if extra:
        doc.update(extra)
    return doc


def _analysis(s, seed, search):
    """Run every closed-form and search analysis; returns (doc, feasible)."""
    s.check_payout_constraint()
    sched = schedule_for(s, seed=seed)
    report = reward_report(s, sched, seed=seed if s.schedule is not None else None)
    doc = {"rewards": report.to_dict()}
    feasible = True
    try:
        doc["target"] = {"breakeven_usagefee": breakeven_usagefee(s, sched)}
    except DegenerateAnalysisError as exc:
        doc["target"] = {"breakeven_usagefee": None, "note": str(exc)}
        feasible = False
    attackers = []
    for i in range(1, s.n_attackers + 1):
        entry = {"id": i}
        try:
            be = breakeven_success_prob(i, s)
            entry["breakeven"] = be.to_dict()
            entry["rent_bound_slack"] = rent_bound_slack(i, s)
            feasible = feasible and be.feasible
        except DegenerateAnalysisError as exc:
            entry["breakeven"] = None
            entry["note"] = str(exc)
            feasible = False
        entry["max_min"] = maxmin_attacker(i, s, search).to_dict()
        entry["min_max"] = minmax_attacker(i, s, search).to_dict()
        attackers.append(entry)
    doc["attackers"] = attackers
    rate = s.rents.max_off_diagonal()
    n_mean = s.traffic.mean()
    if s.C > 0 and n_mean > 0:
        ratio = rent_ratio(rate, s.C)
        doc["attacker_count_bound"] = {
            "rent_rate": rate,
            "C": s.C,
            "ratio": ratio,
            "ratio_floor": int(np.floor(ratio)),
            "horizon_days": s.horizon,
            "mean_customers": n_mean,
            "threshold": ratio * s.horizon / n_mean,
            "min_attackers": min_attackers(rate, s.C, s.horizon, n_mean),
        }
    else:
        doc["attacker_count_bound"] = None
    doc["feasible"] = feasible
    return doc, feasible


def _analysis_rows(doc):
    rows = []
    r = doc["rewards"]
    rows.append(("rewards", "target", "reward", r["target"]))
    for i, v in enumerate(r["attackers"], 1):
        rows.append(("rewards", f"attacker_{i}", "reward", v))
    rows.append(("rewards", "customer", "reward", r["per_customer"]))
    rows.append(("breakeven", "target", "usagefee", doc["target"]["breakeven_usagefee"]))
    for a in doc["attackers"]:
        p = f"attacker_{a['id']}"
        if a["breakeven"] is not None:
            rows.append(("breakeven", p, "required_success_probability",
                         a["breakeven"]["required_success_probability"]))
            rows.append(("breakeven", p, "feasible", a["breakeven"]["feasible"]))
            rows.append(("breakeven", p, "rent_bound_slack", a["rent_bound_slack"]))
        for kind in ("max_min", "min_max"):
            rows.append((kind, p, "optimizer_duration", a[kind]["optimizer_duration"]))
            rows.append((kind, p, "optimal_value", a[kind]["optimal_value"]))
    bound = doc["attacker_count_bound"]
    if bound is not None:
        for key in ("rent_rate", "ratio", "ratio_floor", "threshold", "min_attackers"):
            rows.append(("attacker_count_bound", "all", key, bound[key]))
    return rows


def cmd_analyze(args):
    s = resolve_scenario(args.scenario)
    lower, upper = 0.0, None
    if args.interval:
        try:
            lo, hi = args.interval.split(":")
            lower, upper = float(lo), float(hi)
        except ValueError:
            raise UsageError(f"--interval must be lower:upper, got {args.interval!r}") from None
    doc, feasible = _analysis(s, args.seed, SearchSpec(lower, upper, args.resolution))
    out = _header("analyze", s, args.seed) | doc
    if args.format == "csv":
        text = to_csv(ANALYSIS_HEADER, _analysis_rows(doc))
    else:
        text = to_json(out)
    return text, 0 if feasible else 2


def cmd_simulate(args):
    s = resolve_scenario(args.scenario)
    d = resolve_defense(args.defense)
    summary = run_monte_carlo(s, d, args.trials, args.seed, args.workers)
    if args.format == "csv":
        return to_csv(SUMMARY_HEADER, summary_rows(summary)), 0
    doc = _header("simulate", s, args.seed, {"trials": args.trials, "defense": defense_to_dict(d)})
    doc["summary"] = summary.to_dict()
    return to_json(doc), 0


def cmd_defense_compare(args):
    s = resolve_scenario(args.scenario)
    if args.defense is None:
        raise UsageError("defense-compare needs --defense")
    d = resolve_defense(args.defense)
    cmp = evaluate_defense(s, d, args.trials, args.seed, args.workers)
    if args.format == "csv":
        return to_csv(COMPARISON_HEADER, comparison_rows(cmp)), 0
    doc = _header("defense-compare", s, args.seed, {"trials": args.trials, "defense": defense_to_dict(d)})
    doc["comparison"] = cmp.to_dict()
    return to_json(doc), 0


def sweep_rows(s, d, path, values, trials, seed, workers=1):
    """One row per (sweep value, player), ordered by sweep index then player."""
    section, _, name = path.partition(".")
    rows = []
    for k, value in enumerate(values):
        if section == "scenario":
            s_k, d_k = s.replace(**{SCENARIO_SWEEP_FIELDS[name]: value}), d
        else:
            s_k, d_k = s, replace(d, **{name: value})
        eff = apply_virtual_attacker(s_k, d_k)
        report = reward_report(eff, schedule_for(eff, seed=seed))
        analytic = (report.target,) + report.attackers
        summary = run_monte_carlo(s_k, d_k, trials, seed, workers)
        for player, a, st in zip(summary.players, analytic, summary.reward):
            rows.append((k, path, value, player, a, st.mean, st.std, st.q05, st.q50, st.q95, st.prob_positive))
    return rows


def cmd_sweep(args):
    if not args.sweep:
        raise UsageError("sweep needs --sweep param=start:stop:steps")
    s = resolve_scenario(args.scenario)
    d = resolve_defense(args.defense)
    path, values = parse_sweep(args.sweep)
    rows = sweep_rows(s, d, path, values, args.trials, args.seed, args.workers)
    if args.format == "json":
        doc = _header("sweep", s, args.seed, {"trials": args.trials, "parameter": path})
        doc["rows"] = [dict(zip(SWEEP_HEADER, r)) for r in rows]
        return to_json(doc), 0
    return to_csv(SWEEP_HEADER, rows), 0


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "defense-compare": cmd_defense_compare,
}


def build_parser():
    parser = _Parser(prog=TOOL, description="Botnet rental-market economics and defense analysis.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="scenario JSON file or builtin:<name>")
        p.add_argument("--defense", help="defense JSON file or builtin:<name>")
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="csv" if name == "sweep" else "json")
        p.add_argument("--workers", type=int, default=1, help="processes for Monte Carlo trials")
        if name == "sweep":
            p.add_argument("--sweep", help="param=start:stop:steps or param=v1,v2,...")
        if name == "analyze":
            p.add_argument("--interval", help="attack-duration search interval lower:upper (default 0:T)")
            p.add_argument("--resolution", type=int, default=1000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2**64:
        print(f"{TOOL}: error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 1
    if args.trials < 1:
        print(f"{TOOL}: error: --trials must be at least 1", file=sys.stderr)
        return 1
    try:
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 1
    except DegenerateAnalysisError as exc:
        print(f"{TOOL}: infeasible: {exc}", file=sys.stderr)
        return 2
    except (ScenarioError, OSError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 2:
        print(f"{TOOL}: infeasible: at least one break-even condition cannot be met", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
