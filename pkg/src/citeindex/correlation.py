"""Pearson correlation across indices and across years."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateSampleError, ShapeError
from .indices import IndexRow


@dataclass(frozen=True)
class CorrelationResult:
    r_value: float
    sample_size: int
    pair_description: tuple[str, str]
    dropped: int = 0

    @property
    def label(self):
        return f"{self.pair_description[0]}~{self.pair_description[1]}"


def pearson(x: Sequence[float], y: Sequence[float], labels=("x", "y")) -> CorrelationResult:
    """Sample correlation coefficient, evaluated with mean-centred sums.

    Raises DegenerateSampleError for K < 2 or when either sequence has zero
    variance (the coefficient is 0/0 there).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError(f"length mismatch: {x.shape} vs {y.shape}")
    k = len(x)
    if k < 2:
        raise DegenerateSampleError(f"need at least 2 pairs, got {k}")
    dx = x - math.fsum(x) / k
    dy = y - math.fsum(y) / k
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSampleError("constant sequence: correlation undefined")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return CorrelationResult(min(1.0, max(-1.0, r)), k, tuple(labels))


def _values(rows: Iterable[IndexRow], index, year):
    return {row.journal_id: row.value(index) for row in rows if row.year == year}


def _paired(a: dict, b: dict):
    keys = sorted(set(a) | set(b))
    xs, ys, dropped = [], [], 0
    for key in keys:
        va, vb = a.get(key), b.get(key)
        if va is None or vb is None:
            dropped += 1
            continue
        xs.append(va)
        ys.append(vb)
    return xs, ys, dropped


def cross_index_correlation(rows, index_a: str, index_b: str, year: int) -> CorrelationResult:
    """Correlate two indices over the journals of one year."""
    rows = list(rows)
    xs, ys, dropped = _paired(_values(rows, index_a, year), _values(rows, index_b, year))
    res = pearson(xs, ys, (f"{index_a}({year})", f"{index_b}({year})"))
    return CorrelationResult(res.r_value, res.sample_size, res.pair_description, dropped)


def auto_correlation(rows, index: str, year1: int, year2: int) -> CorrelationResult:
    """Correlate one index with itself across two years, paired by journal_id."""
    rows = list(rows)
    xs, ys, dropped = _paired(_values(rows, index, year1), _values(rows, index, year2))
    res = pearson(xs, ys, (f"{index}({year1})", f"{index}({year2})"))
    return CorrelationResult(res.r_value, res.sample_size, res.pair_description, dropped)


def consecutive_pairs(years):
    years = sorted(set(years))
    return list(zip(years[:-1], years[1:]))


def auto_correlation_table(rows, index: str, pairs=None) -> list[tuple[tuple[int, int], Optional[CorrelationResult]]]:
    """Auto-correlation for each year pair (consecutive years by default).

    Pairs whose sample is degenerate map to ``None``.
    """
    rows = list(rows)
    if pairs is None:
        pairs = consecutive_pairs(row.year for row in rows)
    out = []
    for y1, y2 in pairs:
        try:
            res = auto_correlation(rows, index, y1, y2)
        except DegenerateSampleError:
            res = None
        out.append(((y1, y2), res))
    return out
