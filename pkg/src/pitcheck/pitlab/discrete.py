"""Randomized PITs and CDFs for the count models of the simulation lab."""

import math

import numpy as np

from .. import specfun
from ..errors import DomainError

__all__ = ["randomized_pit_discrete", "poisson_cdf", "negbin_cdf",
           "betabinom_cdf", "binomial_cdf"]

_lgamma = np.vectorize(math.lgamma, otypes=[float])


def randomized_pit_discrete(cdf_at_y, cdf_at_y_minus_1, v):
    """Uniform point inside the CDF jump at y: F(y-1) + v (F(y) - F(y-1)).

    With ``v ~ Uniform(0, 1)`` independent of y the result is exactly
    Uniform(0, 1) when y comes from the model.
    """
    scalar = np.ndim(cdf_at_y) == 0 and np.ndim(cdf_at_y_minus_1) == 0 and np.ndim(v) == 0
    hi = np.asarray(specfun.as_probability(cdf_at_y), dtype=float)
    lo = np.asarray(specfun.as_probability(cdf_at_y_minus_1), dtype=float)
    v = np.asarray(specfun.as_probability(v), dtype=float)
    if np.any(lo > hi):
        raise DomainError("F(y-1) must not exceed F(y)")
    out = lo + v * (hi - lo)
    return float(out) if scalar else out


def poisson_cdf(k, lam):
    """Pr(Y <= k) for Y ~ Poisson(lam), by log-space term summation."""
    k = np.asarray(k, dtype=float)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), k.shape)
    out = np.zeros(k.shape)
    ok = k >= 0
    if not np.any(ok):
        return out
    kk, ll = k[ok], lam[ok]
    kmax = int(kk.max())
    with np.errstate(divide="ignore"):
        loglam = np.log(ll)
    acc = np.zeros(kk.shape)
    lt = -ll  # log pmf at j = 0
    for j in range(kmax + 1):
        acc += np.where(j <= kk, np.exp(lt), 0.0)
        lt = lt + loglam - math.log(j + 1)
    out[ok] = np.minimum(acc, 1.0)
    return out


def negbin_cdf(k, shape, prob):
    """Pr(Y <= k) for the negative binomial counting failures before the
    ``shape``-th success with success probability ``prob``.

    Uses Pr(Y <= k) = I_prob(shape, k + 1).
    """
    k = np.floor(np.asarray(k, dtype=float))
    shape, prob = np.broadcast_arrays(np.asarray(shape, float), np.asarray(prob, float))
    shape = np.broadcast_to(shape, k.shape)
    prob = np.broadcast_to(prob, k.shape)
    out = np.zeros(k.shape)
    ok = k >= 0
    if np.any(ok):
        out[ok] = specfun.reg_inc_beta(prob[ok], shape[ok], k[ok] + 1.0)
    return out


def binomial_cdf(k, N, p):
    """Binomial CDF broadcasting over k and p (N scalar)."""
    k = np.asarray(k, dtype=float)
    p = np.broadcast_to(np.asarray(p, dtype=float), k.shape)
    out = np.zeros(k.shape)
    out[k >= N] = 1.0
    mid = (k >= 0) & (k < N)
    if np.any(mid):
        out[mid] = specfun.binom_cdf(k[mid], N, p[mid])
    return out


def betabinom_cdf(k, N, a, b):
    """Pr(Y <= k) for Y ~ BetaBinomial(N, a, b), summing the pmf in log space."""
    k = np.asarray(k, dtype=float)
    a = np.broadcast_to(np.asarray(a, dtype=float), k.shape).ravel()
    b = np.broadcast_to(np.asarray(b, dtype=float), k.shape).ravel()
    kf = k.ravel()
    j = np.arange(N + 1, dtype=float)
    logc = _lgamma(N + 1.0) - _lgamma(j + 1.0) - _lgamma(N - j + 1.0)
    lp = (logc[None, :] + specfun.log_beta(j[None, :] + a[:, None], N - j[None, :] + b[:, None])
          - specfun.log_beta(a, b)[:, None])
    pmf = np.exp(lp)
    pmf /= pmf.sum(axis=1, keepdims=True)
    cdf = np.cumsum(pmf, axis=1)
    idx = np.clip(kf, -1, N).astype(int)
    out = np.where(idx < 0, 0.0, cdf[np.arange(kf.size), np.maximum(idx, 0)])
    out = np.where(idx >= N, 1.0, out)
    return np.minimum(out, 1.0).reshape(k.shape)
