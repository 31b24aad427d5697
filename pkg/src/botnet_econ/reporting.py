"""JSON and CSV emission with fixed formatting, so reruns diff cleanly."""

from __future__ import annotations

import csv
import io
import json
import math

SIG_DIGITS = 9


def fmt(x) -> str:
    """9 significant digits for floats; ints and strings pass through."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return format(x, f".{SIG_DIGITS}g")
    return str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def summary_rows(summary):
    """(player, metric, value) rows of a SimulationSummary."""
    rows = []
    for player, st in zip(summary.players, summary.reward):
        rows.extend((player, f"reward_{k}", v) for k, v in vars(st).items())
    for player, st in zip(summary.players[1:], summary.intrusion):
        rows.extend((player, f"intrusion_{k}", v) for k, v in vars(st).items())
    for player, st in zip(summary.players[1:], summary.rent):
        rows.extend((player, f"rent_{k}", v) for k, v in vars(st).items())
    rows.append(("customer", "reward", summary.customer_reward))
    rows.append(("customer", "reward_realtime", summary.customer_reward_realtime))
    rows.append(("all", "mean_attacks", summary.mean_attacks))
    return rows


SUMMARY_HEADER = ("player", "metric", "value")
COMPARISON_HEADER = ("player", "metric", "baseline", "defended", "delta")
SWEEP_HEADER = (
    "sweep_index", "parameter", "value", "player", "analytic_reward",
    "mc_mean", "mc_std", "mc_q05", "mc_q50", "mc_q95", "mc_prob_positive",
)
ANALYSIS_HEADER = ("section", "player", "metric", "value")


def comparison_rows(cmp):
    rows = []
    base, dfd = cmp.baseline, cmp.defended
    for j, player in enumerate(cmp.players):
        b, d = base.reward[j], dfd.reward[j]
        rows.append((player, "reward_mean", b.mean, d.mean, d.mean - b.mean))
        rows.append((player, "reward_prob_positive", b.prob_positive, d.prob_positive,
                     d.prob_positive - b.prob_positive))
        if j > 0:
            bi, di = base.intrusion[j - 1], dfd.intrusion[j - 1]
            rows.append((player, "intrusion_mean", bi.mean, di.mean, di.mean - bi.mean))
    if "virtual_attacker" in dfd.players:
        v = dfd.stats("virtual_attacker").mean
        rows.append(("virtual_attacker", "reward_mean", None, v, None))
    return rows
