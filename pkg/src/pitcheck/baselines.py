"""Kolmogorov-Smirnov and Anderson-Darling uniformity tests.

Both assume independent PIT values. They are kept as comparison baselines:
under the dependence typical of LOO-PIT values they become conservative.
"""

import math

import numpy as np

from .combine import TestReport
from .errors import BoundaryValue, EmptySample
from .pointwise import PitSample

__all__ = ["ks_statistic", "ks_pvalue", "kolmogorov_sf", "ks_test",
           "ad_statistic", "ad_pvalue", "ad_test"]

SERIES_TOL = 1e-12
_INDEP = ("independence-assuming",)


def _sorted_values(sample):
    if not isinstance(sample, PitSample):
        sample = PitSample.continuous(sample)
    if sample.n == 0:
        raise EmptySample("EmptySample")
    warn = ()
    if sample.kind != "continuous":
        warn = ("method/kind mismatch: baseline tests expect continuous PIT values",)
    return np.sort(sample.values), warn


def ks_statistic(u_sorted):
    """D = max(D+, D-) for sorted values against the uniform CDF."""
    n = u_sorted.size
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u_sorted)
    d_minus = np.max(u_sorted - (i - 1) / n)
    return float(max(d_plus, d_minus))


def kolmogorov_sf(x):
    """Pr(K > x) for the Kolmogorov limiting distribution.

    Uses the alternating series 2 sum (-1)^(k-1) exp(-2 k^2 x^2) for
    x >= 1 and the theta-function form of the CDF below that, where the
    alternating series converges slowly.
    """
    if x <= 0.0:
        return 1.0
    if x < 1.0:
        c = -math.pi ** 2 / (8.0 * x * x)
        acc = 0.0
        k = 1
        while True:
            term = math.exp(c * (2 * k - 1) ** 2)
            acc += term
            if term < SERIES_TOL * acc or k > 100:
                break
            k += 1
        cdf = math.sqrt(2.0 * math.pi) / x * acc
        return min(1.0, max(0.0, 1.0 - cdf))
    acc = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        acc += term if k % 2 else -term
        if term < SERIES_TOL or k > 100:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * acc))


def ks_pvalue(D, n):
    """Asymptotic p-value with the finite-n shift of the argument."""
    rn = math.sqrt(n)
    x = rn * D + 1.0 / (6.0 * rn) + (rn * D - 1.0) / (4.0 * n)
    return kolmogorov_sf(x)


def ks_test(sample, alpha=0.05):
    """Kolmogorov-Smirnov test of uniformity on [0, 1]."""
    u, warn = _sorted_values(sample)
    D = ks_statistic(u)
    return TestReport(
        method="ks", combiner="none", statistic=D, global_p=ks_pvalue(D, u.size),
        alpha=alpha, n=int(u.size), warnings=warn, flags=_INDEP,
    )


def ad_statistic(u_sorted):
    """Anderson-Darling A^2 for sorted values strictly inside (0, 1)."""
    n = u_sorted.size
    if np.any(u_sorted <= 0.0) or np.any(u_sorted >= 1.0):
        raise BoundaryValue()
    i = np.arange(1, n + 1)
    s = np.sum((2 * i - 1) * (np.log(u_sorted) + np.log1p(-u_sorted[::-1])))
    return float(-n - s / n)


def _adinf(z):
    # limiting CDF of A^2 (Marsaglia & Marsaglia 2004)
    if z <= 0.0:
        return 0.0
    if z < 2.0:
        return math.exp(-1.2337141 / z) / math.sqrt(z) * (
            2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.011672
            - 0.00168691 * z) * z) * z) * z) * z)
    return math.exp(-math.exp(1.0776 - (2.30695 - (0.43424 - (0.082433
        - (0.008056 - 0.0003146 * z) * z) * z) * z) * z))


def _errfix(n, x):
    # finite-n correction to the limiting CDF, as a function of x = adinf(z)
    if x > 0.8:
        return (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360
                - 255.7844 * x) * x) * x) * x) * x) / n
    c = 0.01265 + 0.1757 / n
    if x < c:
        t = x / c
        t = math.sqrt(t) * (1.0 - t) * (49.0 * t - 102.0)
        return t * (0.0037 / n ** 2 + 0.00078 / n + 0.00006) / n
    t = (x - c) / (0.8 - c)
    t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259
        - 1.91864 * t) * t) * t) * t) * t
    return t * (0.04213 / n + 0.01365 / n ** 2) / n


def ad_pvalue(A2, n):
    """Upper-tail p-value of A^2 for a fully specified uniform null.

    Limiting distribution plus a finite-n correction; the CDF is accurate
    to a few units in the fourth decimal for n >= 5.
    """
    x = _adinf(A2)
    cdf = x + _errfix(n, x)
    return min(1.0, max(0.0, 1.0 - cdf))


def ad_test(sample, alpha=0.05):
    """Anderson-Darling test of uniformity on [0, 1]."""
    u, warn = _sorted_values(sample)
    A2 = ad_statistic(u)
    return TestReport(
        method="ad", combiner="none", statistic=A2, global_p=ad_pvalue(A2, u.size),
        alpha=alpha, n=int(u.size), warnings=warn, flags=_INDEP,
    )
