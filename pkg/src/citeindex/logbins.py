"""Geometric bin edges shared by scatter binning and density estimation."""

import math

import numpy as np

# Snaps values sitting on a decade boundary (up to log10 rounding) onto the
# upper bin instead of the lower one.
EDGE_SLACK = 1e-9


def log_edges(x_min, x_max, bins_per_decade):
    """Half-open geometric bins anchored at ``x_min``.

    The bin count is ``floor(span * bins_per_decade) + 1`` with ``span`` in
    decades, so a maximum that lands exactly on an edge opens its own bin.  A degenerate
    span (``x_min == x_max``) yields one bin geometrically centred on the
    value, one bin-width wide.
    """
    if bins_per_decade <= 0:
        raise ValueError("bins_per_decade must be positive")
    if x_min <= 0 or x_max < x_min:
        raise ValueError("need 0 < x_min <= x_max")
    step = 1.0 / bins_per_decade
    lo = math.log10(x_min)
    span = math.log10(x_max) - lo
    if span == 0.0:
        return 10.0 ** np.array([lo - step / 2, lo + step / 2])
    n_bins = int(math.floor(span * bins_per_decade + EDGE_SLACK)) + 1
    return 10.0 ** (lo + step * np.arange(n_bins + 1))


def assign(x, edges):
    """Bin index of each ``x`` for edges produced by :func:`log_edges`."""
    x = np.asarray(x, dtype=float)
    logs = np.log10(edges)
    width = logs[1] - logs[0]
    idx = np.floor((np.log10(x) - logs[0]) / width + EDGE_SLACK).astype(np.int64)
    return np.clip(idx, 0, len(edges) - 2)


def geometric_centers(edges):
    edges = np.asarray(edges, dtype=float)
    # product of roots: no overflow or underflow at extreme magnitudes
    return np.sqrt(edges[:-1]) * np.sqrt(edges[1:])
