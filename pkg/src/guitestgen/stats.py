"""Summary statistics and the paired one-tailed Wilcoxon signed-rank test."""
from __future__ import annotations

import math
import statistics
from fractions import Fraction
from typing import Sequence

EXACT_MAX_N = 20


def summarize(counts: Sequence[float]) -> tuple[float, float]:
    """Mean and sample (n-1) standard deviation of repeated measurements."""
    if len(counts) < 2:
        raise ValueError(f"summarize needs at least 2 repetitions, got {len(counts)}")
    return statistics.fmean(counts), statistics.stdev(counts)


def _doubled_ranks(values: Sequence[float]) -> list[int]:
    """Twice the average ranks of ``values`` (ties share the mean rank)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + 1) + (j + 1)
        i = j + 1
    return ranks


def _exact_upper_tail(ranks2: Sequence[int], observed2: int) -> float:
    # number of sign assignments per achievable doubled rank sum
    dist = {0: 1}
    for r in ranks2:
        nxt = dict(dist)
        for s, c in dist.items():
            nxt[s + r] = nxt.get(s + r, 0) + c
        dist = nxt
    hits = sum(c for s, c in dist.items() if s >= observed2)
    return float(Fraction(hits, 2 ** len(ranks2)))


def _normal_upper_tail(ranks2: Sequence[int], observed2: int, abs_diffs: Sequence[float]) -> float:
    n = len(ranks2)
    mean = n * (n + 1) / 4
    ties: dict[float, int] = {}
    for d in abs_diffs:
        ties[d] = ties.get(d, 0) + 1
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(t**3 - t for t in ties.values()) / 48
    if var <= 0:
        return 1.0
    z = (observed2 / 2 - mean - 0.5) / math.sqrt(var)
    return 0.5 * math.erfc(z / math.sqrt(2))


def wilcoxon_paired_one_tail(x: Sequence[float], y: Sequence[float]) -> float:
    """p-value of the signed-rank test with alternative "y is greater than x".

    Zero differences are dropped and tied absolute differences get average
    ranks. The null distribution is enumerated exactly up to 20 non-zero
    pairs; above that a normal approximation with tie and continuity
    corrections is used. All-zero differences give p = 1.
    """
    if len(x) != len(y):
        raise ValueError(f"paired samples differ in length: {len(x)} vs {len(y)}")
    if not x:
        raise ValueError("wilcoxon needs at least one pair")
    diffs = [b - a for a, b in zip(x, y) if b - a != 0]
    if not diffs:
        return 1.0
    abs_d = [abs(d) for d in diffs]
    ranks2 = _doubled_ranks(abs_d)
    observed2 = sum(r for r, d in zip(ranks2, diffs) if d > 0)
    if len(diffs) <= EXACT_MAX_N:
        return _exact_upper_tail(ranks2, observed2)
    return _normal_upper_tail(ranks2, observed2, abs_d)
