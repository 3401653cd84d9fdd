"""Plain-Python reference computations used as test oracles."""

import math


def naive_pearson(x, y):
    """Textbook two-pass sample correlation coefficient."""
    k = len(x)
    mx = sum(x) / k
    my = sum(y) / k
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sx = sum((a - mx) ** 2 for a in x)
    sy = sum((b - my) ** 2 for b in y)
    return num / math.sqrt(sx * sy)


def ols_line(u, v):
    """Closed-form least-squares line v = c0 + c1 * u: (c0, c1)."""
    k = len(u)
    mu = sum(u) / k
    mv = sum(v) / k
    suu = sum((a - mu) ** 2 for a in u)
    suv = sum((a - mu) * (b - mv) for a, b in zip(u, v))
    c1 = suv / suu
    return mv - c1 * mu, c1


def lognormal_cdf(x, mu, sigma):
    return 0.5 * math.erfc(-(math.log(x) - mu) / (sigma * math.sqrt(2.0)))
