"""Nonparametric tests, the probability effect size A and achievement-gap arithmetic.

Only the chi-square and normal tail functions come from scipy; statistics,
rank handling and the exact Mann-Whitney null are computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2 as _chi2
from scipy.stats import norm as _norm

from ._core import dominance_counts

EXACT_LIMIT = 12


class EmptySample(ValueError):
    pass


class TooFewGroups(ValueError):
    pass


class DegenerateTable(ValueError):
    pass


class ZeroPreGap(ValueError):
    pass


class TooFewStudents(ValueError):
    pass


def _sample(x, name="sample") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64).ravel()
    if a.size == 0:
        raise EmptySample(f"{name} is empty")
    return a


def midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    sv = values[order]
    i = 0
    while i < len(sv):
        j = i
        while j + 1 < len(sv) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts**3 - counts))


@dataclass(frozen=True)
class MannWhitney:
    u: float
    p: float
    method: str


def mann_whitney(x, y, method: str = "auto", continuity: bool = True) -> MannWhitney:
    """U for ``x`` (count of x above y, ties half) and a two-sided p-value.

    ``auto`` enumerates every relabelling of the pooled midranks when the
    pooled size is at most 12 and falls back to the tie-corrected normal
    approximation otherwise.
    """
    x, y = _sample(x, "x"), _sample(y, "y")
    n, m = len(x), len(y)
    pooled = np.concatenate([x, y])
    ranks = midranks(pooled)
    u = float(ranks[:n].sum() - n * (n + 1) / 2.0)
    mu = n * m / 2.0
    if method == "auto":
        method = "exact" if n + m <= EXACT_LIMIT else "normal"
    if method == "exact":
        dev = abs(u - mu)
        hits = total = 0
        for idx in combinations(range(n + m), n):
            total += 1
            uu = ranks[list(idx)].sum() - n * (n + 1) / 2.0
            if abs(uu - mu) >= dev - 1e-9:
                hits += 1
        return MannWhitney(u, min(1.0, hits / total), "exact")
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    N = n + m
    var = n * m / 12.0 * ((N + 1) - _tie_term(pooled) / (N * (N - 1)))
    if var <= 0:
        return MannWhitney(u, 1.0, "normal")
    num = abs(u - mu) - (0.5 if continuity else 0.0)
    z = max(num, 0.0) / math.sqrt(var)
    return MannWhitney(u, float(min(1.0, 2.0 * _norm.sf(z))), "normal")


@dataclass(frozen=True)
class KruskalWallis:
    h: float
    p: float
    df: int


def kruskal_wallis(groups: Sequence) -> KruskalWallis:
    if len(groups) < 2:
        raise TooFewGroups("Kruskal-Wallis needs at least two groups")
    samples = [_sample(g, f"group {i}") for i, g in enumerate(groups)]
    pooled = np.concatenate(samples)
    N = len(pooled)
    ranks = midranks(pooled)
    h = 0.0
    start = 0
    for s in samples:
        r = ranks[start : start + len(s)]
        h += r.sum() ** 2 / len(s)
        start += len(s)
    h = 12.0 / (N * (N + 1)) * h - 3 * (N + 1)
    correction = 1.0 - _tie_term(pooled) / (N**3 - N)
    h = h / correction if correction > 0 else 0.0
    df = len(samples) - 1
    return KruskalWallis(float(h), float(_chi2.sf(h, df)), df)


@dataclass(frozen=True)
class ChiSquare:
    chi2: float
    df: int
    p: float


def chi_square(table, yates: bool = True) -> ChiSquare:
    """Pearson homogeneity test.

    Yates' continuity correction is applied to 2 x 2 tables only (unless
    ``yates`` is False); larger tables are never corrected.
    """
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2 or t.shape[0] < 2 or t.shape[1] < 2:
        raise DegenerateTable(f"need an r x c table with r, c >= 2, got shape {t.shape}")
    if (t < 0).any():
        raise DegenerateTable("counts must be non-negative")
    rows, cols = t.sum(axis=1), t.sum(axis=0)
    if (rows == 0).any() or (cols == 0).any():
        raise DegenerateTable("table has an all-zero row or column")
    expected = np.outer(rows, cols) / t.sum()
    dev = np.abs(t - expected)
    if yates and t.shape == (2, 2):
        dev = np.maximum(dev - 0.5, 0.0)
    stat = float((dev**2 / expected).sum())
    df = (t.shape[0] - 1) * (t.shape[1] - 1)
    return ChiSquare(stat, df, float(_chi2.sf(stat, df)))


def bonferroni(p_values: Sequence[float], m: int | None = None) -> list[float]:
    m = len(p_values) if m is None else m
    if m < len(p_values):
        raise ValueError("m must be at least the number of comparisons")
    return [min(1.0, p * m) for p in p_values]


@dataclass(frozen=True)
class EffectSize:
    a: float
    ci_low: float
    ci_high: float


def _a(xs_sorted: np.ndarray, ys_sorted: np.ndarray) -> float:
    gt, eq = dominance_counts(xs_sorted, ys_sorted)
    return (gt + 0.5 * eq) / (len(xs_sorted) * len(ys_sorted))


def effect_size_a(x, y, iterations: int = 2000, seed: int = 0, level: float = 0.95) -> EffectSize:
    """P(X > Y) + P(X = Y) / 2 with a percentile bootstrap interval."""
    x, y = np.sort(_sample(x, "x")), np.sort(_sample(y, "y"))
    a = _a(x, y)
    if iterations <= 0:
        return EffectSize(a, a, a)
    rng = np.random.default_rng(seed)
    boots = np.empty(iterations)
    for i in range(iterations):
        bx = np.sort(x[rng.integers(0, len(x), len(x))])
        by = np.sort(y[rng.integers(0, len(y), len(y))])
        boots[i] = _a(bx, by)
    tail = (1 - level) / 2 * 100
    lo, hi = np.percentile(boots, [tail, 100 - tail])
    return EffectSize(a, float(min(lo, a)), float(max(hi, a)))


@dataclass(frozen=True)
class Gap:
    pre_gap: float
    post_gap: float
    reduction_percent: float


def gap_metrics(pre_high: float, pre_low: float, post_high: float, post_low: float) -> Gap:
    pre = pre_high - pre_low
    if pre == 0:
        raise ZeroPreGap("the pretest gap is zero, so a reduction is undefined")
    post = post_high - post_low
    return Gap(pre, post, (1.0 - post / pre) * 100.0)


def median_split(scores: Mapping[str, float]) -> tuple[list[str], list[str]]:
    """(High, Low) ids; scores equal to the median go Low."""
    if len(scores) < 2:
        raise TooFewStudents("a median split needs at least two students")
    med = float(np.median(list(scores.values())))
    high = sorted(k for k, v in scores.items() if v > med)
    low = sorted(k for k, v in scores.items() if v <= med)
    return high, low
