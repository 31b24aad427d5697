"""One-dimensional global search: uniform grid, then golden-section polish."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(f: Callable[[float], float], lo: float, hi: float, maximize: bool = True,
                   tol: float = 1e-12, max_iter: int = 200, trace=None) -> tuple[float, float]:
    """Best point seen while golden-section searching ``f`` on [lo, hi].

    Assumes unimodality inside the bracket; the caller keeps whatever the
    grid found if this does no better.
    """
    sign = 1.0 if maximize else -1.0

    def g(x):
        v = f(x)
        if trace is not None:
            trace.append((x, v))
        return v

    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = g(x1), g(x2)
    best = max(((x1, f1), (x2, f2)), key=lambda p: (sign * p[1], -p[0]))
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(hi) + abs(lo)):
            break
        if sign * f1 >= sign * f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = g(x1)
            cand = (x1, f1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = g(x2)
            cand = (x2, f2)
        if sign * cand[1] > sign * best[1] or (cand[1] == best[1] and cand[0] < best[0]):
            best = cand
    return best


def grid_golden_search(f: Callable[[float], float], lower: float, upper: float, resolution: int = 1000,
                       maximize: bool = True, breaks: Sequence[float] = ()) -> tuple[float, float, list[tuple[float, float]]]:
    """Optimize ``f`` over [lower, upper].

    Evaluates ``resolution`` evenly spaced points (ties go to the smallest
    argument), then golden-section refines inside the cells adjacent to the
    grid winner.  ``breaks`` are points where ``f`` may jump (it must be
    right-continuous there): each break and its left neighbour are evaluated
    too, and every smooth piece between breaks gets its own golden pass, so
    narrow pieces cannot slip between grid points.  Returns
    ``(argopt, value, trace)``.
    """
    grid = np.linspace(lower, upper, resolution) if upper > lower else np.array([lower])
    trace = [(float(x), f(float(x))) for x in grid]
    sign = 1.0 if maximize else -1.0
    values = np.array([v for _, v in trace])
    k = int(np.argmax(sign * values))  # first occurrence -> smallest tau on ties
    candidates = [trace[k]]
    if len(grid) > 1:
        lo = float(grid[max(k - 1, 0)])
        hi = float(grid[min(k + 1, len(grid) - 1)])
        candidates.append(golden_section(f, lo, hi, maximize=maximize, trace=trace))
    inner = sorted({float(b) for b in breaks if lower < b <= upper})
    edges = [lower] + inner
    for a, b in zip(edges, edges[1:] + [None] if inner else []):
        if b is None:
            right = upper
        else:
            right = math.nextafter(b, -math.inf)  # left limit of the jump at b
            candidates.append((b, f(b)))
            trace.append(candidates[-1])
        if right <= a:
            continue
        for x in (a, right):
            candidates.append((x, f(x)))
            trace.append(candidates[-1])
        candidates.append(golden_section(f, a, right, maximize=maximize, trace=trace))
    best_x, best_v = candidates[0]
    for x, v in candidates[1:]:
        if sign * v > sign * best_v or (v == best_v and x < best_x):
            best_x, best_v = x, v
    return best_x, best_v, trace
