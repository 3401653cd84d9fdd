"""Empirical densities of index values, mean-rescaled collapse and tail fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import logbins
from .binfit import DEFAULT_BINS_PER_DECADE, linear_fit
from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    DisjointSupportError,
    DomainError,
    InsufficientDataError,
)
from .lsq import levenberg_marquardt

MIN_VALUES = 10
DEFAULT_TAIL_XMIN = 1.0  # in units of the sample mean
COLLAPSE_TOLERANCE = 0.05
# bins whose counting noise on a log-density difference, sqrt(2 / count),
# stays below COLLAPSE_TOLERANCE
COLLAPSE_MIN_COUNT = 800
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EmpiricalDistribution:
    bin_edges: np.ndarray
    bin_centers: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    sample_mean: float
    sample_size: int
    values: np.ndarray = field(repr=False)
    n_dropped: int = 0
    label: str = ""

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    def normalization(self):
        return float(np.sum(self.density * self.widths))


@dataclass(frozen=True)
class ScaledDistribution:
    """X(x) <x> against x / <x>."""

    scaled_edges: np.ndarray
    scaled_x: np.ndarray
    scaled_density: np.ndarray
    counts: np.ndarray
    sample_mean: float
    values: np.ndarray = field(repr=False)
    source_label: str = ""

    @property
    def widths(self):
        return np.diff(self.scaled_edges)

    def normalization(self):
        return float(np.sum(self.scaled_density * self.widths))

    def binned_mean(self):
        """Mean of the scaled variable estimated from the binned curve."""
        return float(np.sum(self.scaled_x * self.scaled_density * self.widths))


@dataclass(frozen=True)
class TailFit:
    kind: str
    fit_range: tuple
    n_bins: int
    residual_rms: float
    mu: Optional[float] = None
    sigma: Optional[float] = None
    gamma: Optional[float] = None
    ses: dict = field(default_factory=dict)
    # cross-checks: moment-matched (mu, sigma) or the tail-index MLE
    moment_mu: Optional[float] = None
    moment_sigma: Optional[float] = None
    mle_gamma: Optional[float] = None
    mle_gamma_se: Optional[float] = None
    mle_tail_size: Optional[int] = None
    iterations: int = 0

    def to_dict(self):
        out = {"kind": self.kind, "fit_range": list(self.fit_range), "n_bins": self.n_bins,
               "residual_rms": self.residual_rms, "ses": dict(self.ses)}
        names = ("mu", "sigma", "moment_mu", "moment_sigma") if self.kind == "lognormal" else (
            "gamma", "mle_gamma", "mle_gamma_se", "mle_tail_size")
        for name in names:
            out[name] = getattr(self, name)
        return out


def empirical_pdf(values: Sequence[float], bins_per_decade=DEFAULT_BINS_PER_DECADE,
                  edges=None, label="") -> EmpiricalDistribution:
    """Log-binned probability density of the positive entries of ``values``.

    Density is count / (n * width), so it integrates to one over the bins.
    Custom ``edges`` must be geometric (equal log width); values outside
    them are dropped.
    """
    values = np.asarray(values, dtype=float)
    keep = np.isfinite(values) & (values > 0)
    v = values[keep]
    if len(v) < MIN_VALUES:
        raise InsufficientDataError(f"need >= {MIN_VALUES} positive values, got {len(v)}")
    if edges is None:
        edges = logbins.log_edges(v.min(), v.max(), bins_per_decade)
    else:
        edges = np.asarray(edges, dtype=float)
        inside = (v >= edges[0] * (1 - 1e-12)) & (v <= edges[-1] * (1 + 1e-12))
        v = v[inside]
        if len(v) < MIN_VALUES:
            raise InsufficientDataError("too few values inside the supplied edges")
    dropped = int(len(values) - len(v))
    idx = logbins.assign(v, edges)
    counts = np.bincount(idx, minlength=len(edges) - 1)
    density = counts / (len(v) * np.diff(edges))
    return EmpiricalDistribution(
        edges, logbins.geometric_centers(edges), counts, density,
        float(math.fsum(v) / len(v)), len(v), np.sort(v), dropped, label,
    )


def scale_collapse(dist: EmpiricalDistribution, label=None) -> ScaledDistribution:
    mean = dist.sample_mean
    if not mean > 0:
        raise DegenerateSampleError("sample mean must be positive to rescale")
    return ScaledDistribution(
        dist.bin_edges / mean, dist.bin_centers / mean, dist.density * mean,
        dist.counts, mean, dist.values / mean, dist.label if label is None else label,
    )


def _curve(dist):
    if isinstance(dist, ScaledDistribution):
        return dist.scaled_x, dist.scaled_density, dist.counts, dist.values
    return dist.bin_centers, dist.density, dist.counts, dist.values


def _log_curve(dist, min_count=1):
    x, rho, counts, _ = _curve(dist)
    keep = rho > 0
    if counts is not None:
        keep &= counts >= min_count
    return np.log(x[keep]), np.log(rho[keep])


def collapse_distance(a, b, min_count=1) -> float:
    """RMS difference of log densities where both curves have support.

    Support is the bins with positive density holding at least ``min_count``
    samples.  Both curves are interpolated (linearly in log-log) onto the
    union of their supported bin centers inside the common range.
    """
    xa, ya = _log_curve(a, min_count)
    xb, yb = _log_curve(b, min_count)
    if len(xa) == 0 or len(xb) == 0:
        raise DisjointSupportError("a curve has no positive-density bins")
    lo, hi = max(xa[0], xb[0]), min(xa[-1], xb[-1])
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if lo > hi + slack:
        raise DisjointSupportError("scaled supports do not overlap")
    grid = np.union1d(xa, xb)
    grid = grid[(grid >= lo - slack) & (grid <= hi + slack)]
    diff = np.interp(grid, xa, ya) - np.interp(grid, xb, yb)
    return float(np.sqrt(np.mean(diff**2)))


def median_curve(dists, bins_per_decade=DEFAULT_BINS_PER_DECADE, min_count=1, label="median") -> ScaledDistribution:
    """Pointwise median (in log density) of several scaled curves.

    The grid is geometric over the union of supports; at each grid point the
    median is taken over the curves whose support covers it.  The result
    carries no counts (``counts is None``).
    """
    curves = [_log_curve(d, min_count) for d in dists]
    curves = [c for c in curves if len(c[0])]
    if not curves:
        raise DisjointSupportError("no curve has positive density")
    lo = min(c[0][0] for c in curves)
    hi = max(c[0][-1] for c in curves)
    edges = logbins.log_edges(math.exp(lo), math.exp(hi), bins_per_decade)
    grid = np.log(logbins.geometric_centers(edges))
    grid = grid[(grid >= lo) & (grid <= hi)]
    med = np.empty(len(grid))
    for i, g in enumerate(grid):
        vals = [np.interp(g, cx, cy) for cx, cy in curves if cx[0] <= g <= cx[-1]]
        med[i] = np.median(vals) if vals else np.nan
    ok = np.isfinite(med)
    x = np.exp(grid[ok])
    step = 1.0 / bins_per_decade
    sedges = np.concatenate([x * 10 ** (-step / 2), x[-1:] * 10 ** (step / 2)])
    return ScaledDistribution(sedges, x, np.exp(med[ok]), None, 1.0, np.array([]), label)


def collapse_report(dists, min_count=COLLAPSE_MIN_COUNT) -> dict:
    """Distance of each scaled curve to the pointwise median of all of them."""
    med = median_curve(dists, min_count=min_count)
    return {d.source_label or str(i): collapse_distance(d, med, min_count) for i, d in enumerate(dists)}


def pooled_scaled_pdf(samples, bins_per_decade=DEFAULT_BINS_PER_DECADE, label="pooled") -> EmpiricalDistribution:
    """Density of x / <x> with each sample rescaled by its own mean, then pooled."""
    pooled = []
    for values in samples:
        v = np.asarray(values, dtype=float)
        v = v[np.isfinite(v) & (v > 0)]
        if len(v):
            pooled.append(v / (math.fsum(v) / len(v)))
    if not pooled:
        raise InsufficientDataError("no positive values to pool")
    return empirical_pdf(np.concatenate(pooled), bins_per_decade, label=label)


def _select(dist, lo, hi, weighted):
    x, rho, counts, values = _curve(dist)
    sel = (rho > 0) & (x >= lo) & (x <= hi)
    w = counts[sel].astype(float) if weighted and counts is not None else np.ones(int(sel.sum()))
    return x[sel], rho[sel], w, values


def lognormal_log_density(x, mu, sigma):
    lx = np.log(x)
    return -lx - math.log(sigma) - LOG_SQRT_2PI - (lx - mu) ** 2 / (2 * sigma**2)


def fit_lognormal(dist, fit_range=None, weighted=True, max_iter=500) -> TailFit:
    """Least squares of log density against the lognormal log density in (mu, sigma).

    ``weighted`` weights each bin by its count, the inverse Poisson variance
    of its log density.  Moment-matched (mu, sigma) of the raw values are
    reported alongside.
    """
    lo, hi = fit_range if fit_range is not None else (0.0, math.inf)
    x, rho, w, values = _select(dist, lo, hi, weighted)
    if len(x) < 4:
        raise InsufficientDataError(f"lognormal fit needs >= 4 bins in range, got {len(x)}")
    lx, target = np.log(x), np.log(rho)

    # start: quadratic in log x of log(x * density)
    c2, c1, _ = np.polyfit(lx, target + lx, 2)
    if c2 < 0:
        sigma0 = math.sqrt(-1.0 / (2 * c2))
        mu0 = c1 * sigma0**2
    else:
        mu0, sigma0 = float(np.mean(lx)), float(np.std(lx)) or 1.0

    sw = np.sqrt(w)

    def residual(p):
        return sw * (lognormal_log_density(x, p[0], p[1]) - target)

    def jacobian(p):
        mu, sigma = p
        d = lx - mu
        return sw[:, None] * np.column_stack([d / sigma**2, -1.0 / sigma + d**2 / sigma**3])

    res = levenberg_marquardt(residual, jacobian, [mu0, sigma0], max_iter=max_iter,
                              feasible=lambda p: p[1] > 0)
    if not res.converged:
        raise ConvergenceError("lognormal fit did not converge",
                               best={"mu": res.params[0], "sigma": res.params[1]}, objective=res.objective)
    mu, sigma = res.params
    se = res.standard_errors()
    logs = np.log(values) if len(values) else np.array([np.nan])
    return TailFit(
        kind="lognormal", fit_range=(float(x[0]), float(x[-1])), n_bins=len(x),
        residual_rms=float(np.sqrt(np.mean((res.residuals / sw) ** 2))),
        mu=float(mu), sigma=float(sigma), ses={"mu": float(se[0]), "sigma": float(se[1])},
        moment_mu=float(np.mean(logs)), moment_sigma=float(np.std(logs)),
        iterations=res.iterations,
    )


def tail_mle(values, x_min):
    """Continuous power-law tail index MLE over values >= x_min: (gamma, se, k)."""
    v = np.asarray(values, dtype=float)
    tail = v[v >= x_min]
    k = len(tail)
    if k < 2:
        raise InsufficientDataError(f"only {k} values above x_min={x_min:g}")
    s = math.fsum(np.log(tail / x_min))
    if s <= 0:
        raise DegenerateSampleError("all tail values equal x_min")
    gamma = 1.0 + k / s
    return gamma, (gamma - 1.0) / math.sqrt(k), k


def fit_power_tail(dist, x_min=DEFAULT_TAIL_XMIN, weighted=True) -> TailFit:
    """Decay exponent from a straight-line fit of log density on bins centred >= x_min.

    Bins are count-weighted unless ``weighted`` is false.  The
    maximum-likelihood tail index over the raw values >= x_min is reported
    alongside as a cross-check.
    """
    x, rho, w, values = _select(dist, x_min, math.inf, weighted)
    if len(x) < 3:
        raise InsufficientDataError(f"power tail needs >= 3 bins at x >= {x_min:g}, got {len(x)}")
    lf = linear_fit(np.log(x), np.log(rho), w)
    gamma = -lf.slope
    if not gamma > 1:
        raise DomainError(f"tail exponent {gamma:.4g} <= 1: not a normalisable power tail")
    mle = se_mle = k = None
    if len(values):
        try:
            mle, se_mle, k = tail_mle(values, x_min)
        except (InsufficientDataError, DegenerateSampleError):
            pass
    return TailFit(
        kind="power", fit_range=(float(x[0]), float(x[-1])), n_bins=len(x),
        residual_rms=lf.residual_rms, gamma=float(gamma),
        ses={"gamma": float(math.sqrt(max(lf.cov[1, 1], 0.0)))},
        mle_gamma=mle, mle_gamma_se=se_mle, mle_tail_size=k,
    )


def xi_from_tail_exponents(gamma_I: float, gamma_r: float) -> float:
    """Coupling exponent xi implied by I ~ r**xi and the two tail exponents.

    A power tail I**-gamma_I mapped through I ~ r**xi gives r a tail
    r**(-gamma_I*xi + xi - 1); matching it to r**-gamma_r yields
    xi = (gamma_r - 1) / (gamma_I - 1).
    """
    if not gamma_I > 1:
        raise DomainError("gamma_I must exceed 1")
    return (gamma_r - 1.0) / (gamma_I - 1.0)


def gamma_r_from_xi(gamma_I: float, xi: float) -> float:
    return gamma_I * xi - xi + 1.0
