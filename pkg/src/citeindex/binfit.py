"""Log-binned scatter data and the three cross-index fit forms.

* power law            y = a * x**xi
* piecewise power law  separate (a, xi) below and above a breakpoint
* stretched log        log y = c + a * (log x)**b

Logs are natural throughout; fits run on bin means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import logbins
from .errors import ConvergenceError, DomainError, EmptyDataError, InsufficientDataError
from .lsq import levenberg_marquardt

DEFAULT_BINS_PER_DECADE = 10
DEFAULT_MIN_COUNT = 3
DEFAULT_BREAKPOINT = 50.0
STRETCHED_STARTS = (0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class BinnedSeries:
    bin_centers: np.ndarray
    bin_means: np.ndarray
    bin_counts: np.ndarray
    bin_sems: np.ndarray
    n_dropped: int = 0
    bin_lo: Optional[np.ndarray] = None
    bin_hi: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.bin_centers)

    @classmethod
    def unbinned(cls, x, y):
        """Each point as its own bin (count 1, no SEM)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        order = np.argsort(x, kind="stable")
        n = len(x)
        return cls(x[order], y[order], np.ones(n, dtype=np.int64), np.full(n, np.nan))

    def subset(self, mask):
        mask = np.asarray(mask, dtype=bool)
        pick = lambda a: None if a is None else a[mask]
        return replace(
            self,
            bin_centers=self.bin_centers[mask],
            bin_means=self.bin_means[mask],
            bin_counts=self.bin_counts[mask],
            bin_sems=self.bin_sems[mask],
            bin_lo=pick(self.bin_lo),
            bin_hi=pick(self.bin_hi),
        )

    def scaled_x(self, k):
        """Same series with every x multiplied by ``k``."""
        mul = lambda a: None if a is None else a * k
        return replace(self, bin_centers=self.bin_centers * k, bin_lo=mul(self.bin_lo), bin_hi=mul(self.bin_hi))


def _merge_groups(occupied, counts, min_count):
    """Group consecutive occupied bins until each group holds >= min_count points."""
    groups, current, total = [], [], 0
    for b in occupied:
        current.append(b)
        total += counts[b]
        if total >= min_count:
            groups.append(current)
            current, total = [], 0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return groups


def log_bin(x, y, bins_per_decade=DEFAULT_BINS_PER_DECADE, min_count=DEFAULT_MIN_COUNT) -> BinnedSeries:
    """Average ``y`` in geometric bins of ``x``.

    Points with x <= 0 (or non-finite x, y) are dropped and counted.  Bins
    holding fewer than ``min_count`` points are merged with their right
    neighbour (the last sparse run joins the bin on its left); the merged
    bin's center is the geometric center of its combined edges.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y differ in length")
    keep = (x > 0) & np.isfinite(x) & np.isfinite(y)
    dropped = int(len(x) - keep.sum())
    x, y = x[keep], y[keep]
    if len(x) == 0:
        raise EmptyDataError("no points with x > 0")

    edges = logbins.log_edges(x.min(), x.max(), bins_per_decade)
    idx = logbins.assign(x, edges)
    counts = np.bincount(idx, minlength=len(edges) - 1)
    groups = _merge_groups(np.flatnonzero(counts), counts, min_count)

    centers, means, n_pts, sems, lo, hi = [], [], [], [], [], []
    for g in groups:
        sel = np.isin(idx, g)
        ys = y[sel]
        k = len(ys)
        lo.append(edges[g[0]])
        hi.append(edges[g[-1] + 1])
        centers.append(math.sqrt(lo[-1]) * math.sqrt(hi[-1]))
        means.append(ys.mean())
        n_pts.append(k)
        sems.append(ys.std(ddof=1) / math.sqrt(k) if k > 1 else np.nan)
    return BinnedSeries(
        np.array(centers), np.array(means), np.array(n_pts, dtype=np.int64), np.array(sems),
        dropped, np.array(lo), np.array(hi),
    )


# linear regression ---------------------------------------------------------

def _log_weights(binned):
    """Inverse variance of log(bin mean) from the SEMs: (mean / sem)**2.

    Bins without a usable SEM get the smallest weight seen.
    """
    rel = binned.bin_sems / np.abs(binned.bin_means)
    w = np.where(np.isfinite(rel) & (rel > 0), 1.0 / np.where(rel > 0, rel, 1.0) ** 2, np.nan)
    if np.all(np.isnan(w)):
        return np.ones_like(w)
    return np.where(np.isnan(w), np.nanmin(w), w)


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    slope: float
    cov: np.ndarray
    rss: float
    residual_rms: float


def linear_fit(u, v, w=None) -> LinearFit:
    """Least-squares line ``v = intercept + slope * u``, optionally weighted.

    Covariance is ``s^2 (X^T W X)^-1`` with ``s^2`` the weighted residual
    variance on m - 2 degrees of freedom.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m = len(u)
    w = np.ones(m) if w is None else np.asarray(w, dtype=float)
    X = np.column_stack([np.ones(m), u])
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(X * sw[:, None], v * sw, rcond=None)
    resid = v - X @ beta
    wrss = float(np.sum(w * resid**2))
    s2 = wrss / (m - 2) if m > 2 else 0.0
    cov = s2 * np.linalg.inv(X.T @ (X * w[:, None]))
    return LinearFit(float(beta[0]), float(beta[1]), cov, wrss, float(np.sqrt(np.mean(resid**2))))


# power law -----------------------------------------------------------------

@dataclass(frozen=True)
class PowerLawFit:
    amplitude: float
    exponent: float
    amplitude_se: float
    exponent_se: float
    residual_rms: float
    n_bins: int
    log_amplitude: float
    rss: float
    weighted: bool = False

    def predict(self, x):
        return self.amplitude * np.asarray(x, dtype=float) ** self.exponent

    def params(self):
        return {"a": self.amplitude, "xi": self.exponent}

    def ses(self):
        return {"a": self.amplitude_se, "xi": self.exponent_se}


def fit_power_law(binned: BinnedSeries, weighted=False) -> PowerLawFit:
    """Straight line through log(bin mean) vs log(bin center)."""
    if len(binned) < 3:
        raise InsufficientDataError(f"power-law fit needs >= 3 bins, got {len(binned)}")
    if np.any(binned.bin_means <= 0):
        raise DomainError("non-positive bin mean: log undefined")
    w = _log_weights(binned) if weighted else None
    lf = linear_fit(np.log(binned.bin_centers), np.log(binned.bin_means), w)
    amp = math.exp(lf.intercept)
    se_int = math.sqrt(max(lf.cov[0, 0], 0.0))
    return PowerLawFit(
        amplitude=amp,
        exponent=lf.slope,
        amplitude_se=amp * se_int,
        exponent_se=math.sqrt(max(lf.cov[1, 1], 0.0)),
        residual_rms=lf.residual_rms,
        n_bins=len(binned),
        log_amplitude=lf.intercept,
        rss=lf.rss,
        weighted=weighted,
    )


# piecewise power law -------------------------------------------------------

@dataclass(frozen=True)
class PiecewisePowerLawFit:
    low: PowerLawFit
    high: PowerLawFit
    breakpoint: float
    searched: bool = False

    @property
    def rss(self):
        return self.low.rss + self.high.rss

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.breakpoint, self.low.predict(x), self.high.predict(x))

    def params(self):
        return {"a_low": self.low.amplitude, "xi_low": self.low.exponent,
                "a_high": self.high.amplitude, "xi_high": self.high.exponent,
                "breakpoint": self.breakpoint}

    def ses(self):
        return {"a_low": self.low.amplitude_se, "xi_low": self.low.exponent_se,
                "a_high": self.high.amplitude_se, "xi_high": self.high.exponent_se}


def _split_fit(binned, breakpoint, weighted):
    below = binned.bin_centers < breakpoint
    if below.sum() < 3 or (~below).sum() < 3:
        raise InsufficientDataError(
            f"breakpoint {breakpoint:g} leaves {below.sum()} / {(~below).sum()} bins; need >= 3 each side"
        )
    return (fit_power_law(binned.subset(below), weighted),
            fit_power_law(binned.subset(~below), weighted))


def fit_piecewise_power_law(binned: BinnedSeries, breakpoint: Optional[float] = DEFAULT_BREAKPOINT,
                            weighted=False) -> PiecewisePowerLawFit:
    """Independent power laws for bins centred below / at-or-above ``breakpoint``.

    ``breakpoint=None`` searches the geometric midpoints between consecutive
    bin centers (leaving >= 3 bins a side) for the smallest total log-space
    residual sum of squares; ties go to the smaller breakpoint.
    """
    if breakpoint is not None:
        if breakpoint <= 0:
            raise DomainError("breakpoint must be positive")
        low, high = _split_fit(binned, breakpoint, weighted)
        return PiecewisePowerLawFit(low, high, float(breakpoint))

    c = binned.bin_centers
    # totals closer than rounding noise on the log-y sum of squares are ties
    logy = np.log(binned.bin_means[binned.bin_means > 0])
    tie = 1e-12 * max(float(np.sum((logy - logy.mean()) ** 2)) if len(logy) else 0.0, 1e-300)
    best = None
    for i in range(3, len(c) - 2):
        bp = math.sqrt(c[i - 1]) * math.sqrt(c[i])
        low, high = _split_fit(binned, bp, weighted)
        total = low.rss + high.rss
        if best is None or total < best[0] - tie:
            best = (total, PiecewisePowerLawFit(low, high, bp, searched=True))
    if best is None:
        raise InsufficientDataError(f"breakpoint search needs >= 6 bins, got {len(c)}")
    return best[1]


# stretched log -------------------------------------------------------------

@dataclass(frozen=True)
class StretchedLogFit:
    a_coeff: float
    b_expo: float
    c_offset: float
    a_se: float
    b_se: float
    c_se: float
    residual_rms: float
    n_bins: int
    objective: float
    iterations: int = 0
    method: str = "linear"
    history: tuple = field(default=(), repr=False)
    weighted: bool = False

    def predict(self, x):
        return np.exp(self.c_offset + self.a_coeff * np.log(np.asarray(x, dtype=float)) ** self.b_expo)

    def params(self):
        return {"a": self.a_coeff, "b": self.b_expo, "c": self.c_offset}

    def ses(self):
        return {"a": self.a_se, "b": self.b_se, "c": self.c_se}


def _stretched_inputs(binned, weighted):
    if len(binned) < 4:
        raise InsufficientDataError(f"stretched-log fit needs >= 4 bins, got {len(binned)}")
    if np.any(binned.bin_centers <= 1.0):
        raise DomainError("stretched-log fit needs bin centers > 1 (log x > 0)")
    if np.any(binned.bin_means <= 0):
        raise DomainError("non-positive bin mean: log undefined")
    w = _log_weights(binned) if weighted else np.ones(len(binned))
    return np.log(binned.bin_centers), np.log(binned.bin_means), w


def fit_stretched_log(binned: BinnedSeries, b: Optional[float] = None, weighted=False,
                      starts=STRETCHED_STARTS, max_iter=500, rtol=1e-10) -> StretchedLogFit:
    """Fit ``log y = c + a (log x)**b``.

    With ``b`` fixed the model is linear in (a, c) and solved directly.
    Otherwise each start value of ``b`` seeds (a, c) by the linear solve and
    Levenberg-Marquardt refines all three; the lowest objective among
    converged starts wins (earlier start on ties).
    """
    L, v, w = _stretched_inputs(binned, weighted)
    m = len(L)
    if b is not None:
        lf = linear_fit(L**b, v, w)
        resid = v - lf.intercept - lf.slope * L**b
        return StretchedLogFit(
            lf.slope, float(b), lf.intercept,
            math.sqrt(max(lf.cov[1, 1], 0.0)), 0.0, math.sqrt(max(lf.cov[0, 0], 0.0)),
            float(np.sqrt(np.mean(resid**2))), m, lf.rss, weighted=weighted,
        )

    sw = np.sqrt(w)
    logL = np.log(L)

    def residual(p):
        a, bb, c = p
        return sw * (c + a * L**bb - v)

    def jacobian(p):
        a, bb, _ = p
        Lb = L**bb
        return sw[:, None] * np.column_stack([Lb, a * Lb * logL, np.ones(m)])

    best = None
    fallback = None
    for b0 in starts:
        lf = linear_fit(L**b0, v, w)
        res = levenberg_marquardt(residual, jacobian, [lf.slope, b0, lf.intercept],
                                  max_iter=max_iter, rtol=rtol, feasible=lambda p: p[1] > 0)
        if fallback is None or res.objective < fallback.objective:
            fallback = res
        if res.converged and (best is None or res.objective < best.objective):
            best = res
    if best is None:
        raise ConvergenceError(
            f"stretched-log fit did not converge in {max_iter} iterations from any start",
            best=dict(zip("abc", fallback.params)), objective=fallback.objective,
        )
    a, bb, c = best.params
    se = best.standard_errors()
    resid = c + a * L**bb - v
    return StretchedLogFit(
        float(a), float(bb), float(c), float(se[0]), float(se[1]), float(se[2]),
        float(np.sqrt(np.mean(resid**2))), m, best.objective, best.iterations, best.method,
        tuple(best.history), weighted,
    )


# bootstrap -----------------------------------------------------------------

def bootstrap_ses(binned: BinnedSeries, fitter, n_resamples=200, seed=0) -> dict:
    """Standard deviation of each fitted parameter over bin resamples.

    ``fitter`` maps a BinnedSeries to a fit object exposing ``params()``.
    Resamples on which the fit fails are skipped; the count used is returned
    under ``"n_resamples"``.
    """
    rng = np.random.default_rng(seed)
    m = len(binned)
    draws = []
    for _ in range(n_resamples):
        pick = np.sort(rng.integers(0, m, size=m))
        sample = BinnedSeries(binned.bin_centers[pick], binned.bin_means[pick],
                              binned.bin_counts[pick], binned.bin_sems[pick])
        try:
            draws.append(fitter(sample).params())
        except (InsufficientDataError, DomainError, ConvergenceError, np.linalg.LinAlgError):
            continue
    out = {"n_resamples": len(draws)}
    if len(draws) > 1:
        for key in draws[0]:
            out[key] = float(np.std([d[key] for d in draws], ddof=1))
    return out
