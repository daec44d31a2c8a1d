"""Distribution primitives used by the tests and the simulator.

Everything here is implemented on top of numpy and the standard library:
the regularized incomplete beta function (continued fraction with an
exactly computed centering term), binomial, Cauchy, normal, Student-t and
exponential helpers.
All functions accept scalars or arrays and broadcast like numpy ufuncs;
scalar input gives a Python float back.

Accuracy targets: ``reg_inc_beta`` is accurate to about 1e-14 absolute for
shape parameters up to 1e6, ``normal_cdf`` to 1e-15 relative, and the
quantile functions round-trip to better than 1e-9.
"""

import math

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "as_probability",
    "reg_inc_beta",
    "binom_cdf",
    "binom_tails",
    "beta_tails",
    "binom_pmf",
    "cauchy_cdf",
    "cauchy_sf",
    "cauchy_quantile",
    "cauchy_transform",
    "normal_cdf",
    "normal_sf",
    "normal_quantile",
    "student_t_cdf",
    "exp_quantile",
    "log_beta",
]

PROB_TOL = 1e-12
CF_EPS = 1e-15
CF_MIN_ITER = 500
_TINY = 1e-300
_LOG_2PI = math.log(2.0 * math.pi)
# Stirling series for log Gamma(z) - [(z - 1/2) log z - z + log(2 pi)/2]
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN = 8.0

_erfc = np.vectorize(math.erfc, otypes=[float])
_lgamma = np.vectorize(math.lgamma, otypes=[float])


def _out(arr, scalar):
    if scalar:
        return float(arr)
    return arr


def _is_scalar(*args):
    return all(np.ndim(a) == 0 for a in args)


def as_probability(value, tol=PROB_TOL):
    """Validate that ``value`` lies in [0, 1], clamping rounding noise.

    Values outside the interval by more than ``tol`` raise
    :class:`DomainError`; values within ``tol`` are clipped.
    """
    scalar = _is_scalar(value)
    v = np.asarray(value, dtype=float)
    if np.any(np.isnan(v)) or np.any(v < -tol) or np.any(v > 1.0 + tol):
        raise DomainError(f"probability outside [0, 1]: {value!r}")
    return _out(np.clip(v, 0.0, 1.0), scalar)


def _stirling_err(z):
    """log Gamma(z) minus its Stirling approximation, for z >= 8."""
    z = np.asarray(z, dtype=float)
    r = 1.0 / (z * z)
    acc = np.zeros_like(z)
    for c in reversed(_STIRLING):
        acc = acc * r + c
    return acc / z


def _log1pmx(d):
    """log(1 + d) - d without cancellation for small |d|."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    small = np.abs(d) <= 0.3
    big = ~small
    out[big] = np.log1p(d[big]) - d[big]
    ds = d[small]
    r = ds / (2.0 + ds)
    r2 = r * r
    # log1p(d) = 2 atanh(r); 2r - d = -r d
    acc = np.zeros_like(ds)
    for k in range(31, 1, -2):
        acc = acc * r2 + 2.0 / k
    out[small] = -r * ds + acc * r2 * r
    return out


def log_beta(a, b):
    """log B(a, b) with Stirling-difference handling for large arguments."""
    scalar = _is_scalar(a, b)
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    out = np.empty(a.shape)
    both_small = hi < _STIRLING_MIN
    one_small = (~both_small) & (lo < _STIRLING_MIN)
    both_big = lo >= _STIRLING_MIN

    if np.any(both_small):
        s, h = lo[both_small], hi[both_small]
        out[both_small] = _lgamma(s) + _lgamma(h) - _lgamma(s + h)
    if np.any(one_small):
        s, h = lo[one_small], hi[one_small]
        # lgamma(h) - lgamma(h + s) via Stirling with the correction term
        diff = (
            -(h - 0.5) * np.log1p(s / h)
            - s * np.log(h + s)
            + s
            + _stirling_err(h)
            - _stirling_err(h + s)
        )
        out[one_small] = _lgamma(s) + diff
    if np.any(both_big):
        s, h = lo[both_big], hi[both_big]
        t = s + h
        out[both_big] = (
            0.5 * _LOG_2PI
            + (s - 0.5) * np.log(s / t)
            + h * np.log1p(-s / t)
            - 0.5 * np.log(h)
            + _stirling_err(s)
            + _stirling_err(h)
            - _stirling_err(t)
        )
    return _out(out, scalar)


def _scaled_log1pmx(a, e, lx, t):
    """a * log1pmx(e / a) given 1 + e/a = x t / a and log x.

    Far from the mode log x is used directly, so rounding can never push
    e / a below -1.
    """
    r = e / a
    near = np.abs(r) <= 0.3
    far = ~near
    out = np.empty(r.shape)
    out[near] = a[near] * _log1pmx(r[near])
    out[far] = a[far] * (lx[far] + np.log(t[far] / a[far])) - e[far]
    return out


def _log_prefactor(lx, ly, dx, a, b):
    """log( x^a (1-x)^b / B(a, b) ) for 0 < x < 1.

    Takes log x, log(1 - x) and x - a/(a+b) precomputed so that the
    reflected evaluation never rounds 1 - x.
    """
    out = np.empty(lx.shape)
    big = (a >= _STIRLING_MIN) & (b >= _STIRLING_MIN)
    rest = ~big
    if np.any(big):
        d, aa, bb = dx[big], a[big], b[big]
        t = aa + bb
        out[big] = (
            0.5 * np.log(aa * bb / (2.0 * math.pi * t))
            + _scaled_log1pmx(aa, d * t, lx[big], t)
            + _scaled_log1pmx(bb, -d * t, ly[big], t)
            + _stirling_err(t)
            - _stirling_err(aa)
            - _stirling_err(bb)
        )
    if np.any(rest):
        aa, bb = a[rest], b[rest]
        out[rest] = aa * lx[rest] + bb * ly[rest] - log_beta(aa, bb)
    return out


def _two_prod(u, v):
    """Error-free product: u * v == hi + lo exactly (Dekker splitting)."""
    hi = u * v
    split = 134217729.0
    cu = split * u
    uh = cu - (cu - u)
    ul = u - uh
    cv = split * v
    vh = cv - (cv - v)
    vl = v - vh
    lo = ((uh * vh - hi) + uh * vl + ul * vh) + ul * vl
    return hi, lo


def _two_sum(u, v):
    s = u + v
    bv = s - u
    return s, (u - (s - bv)) + (v - bv)


def _centered(x, a, b):
    """Return (x (a+b) - a, a + b) with the difference formed exactly.

    The first value is -lambda in the usual notation; it is tiny near the
    mean of the Beta(a, b) law, where naive evaluation cancels.
    """
    t, t_lo = _two_sum(a, b)
    xt, xt_lo = _two_prod(x, t)
    g, g_lo = _two_sum(xt, -a)
    return g + (g_lo + xt_lo + x * t_lo), t


def _betacf(x, y, a, b, lam):
    """Continued fraction for I_x(a, b) / front, in forward-recurrence form.

    ``lam`` is a - (a + b) x, supplied accurately by the caller; it must
    exceed -1, which the reflection rule guarantees. Returns the fraction
    value that multiplies x^a y^b / B(a, b).
    """
    cap = max(CF_MIN_ITER, int(20 * math.sqrt(float(np.max(np.maximum(a, b))))))
    c = lam + 1.0
    c0 = b / a
    c1 = 1.0 / a + 1.0
    yp1 = y + 1.0
    p = np.ones_like(x)
    s = a + 1.0
    an = np.zeros_like(x)
    bn = np.ones_like(x)
    anp1 = np.ones_like(x)
    bnp1 = c / c1
    r = c1 / c
    done = np.zeros(x.shape, dtype=bool)
    for n in range(1, cap + 1):
        t = n / a
        w = n * (b - n) * x
        e = a / s
        alpha = p * (p + c0) * e * e * (w * x)
        e = (t + 1.0) / (c1 + t + t)
        beta = n + w / s + e * (c + n * yp1)
        p = t + 1.0
        s = s + 2.0
        anp1, an = alpha * an + beta * anp1, anp1
        bnp1, bn = alpha * bn + beta * bnp1, bnp1
        r_new = anp1 / bnp1
        conv = np.abs(r_new - r) <= CF_EPS * r_new
        r = np.where(done, r, r_new)
        done |= conv
        if done.all():
            return r
        an = an / bnp1
        bn = bn / bnp1
        anp1 = r_new
        bnp1 = np.ones_like(x)
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {cap} iterations"
    )


def _ibeta_pair(x, a, b):
    """Return (I_x(a, b), 1 - I_x(a, b)), each computed without cancellation."""
    x, a, b = np.broadcast_arrays(
        np.asarray(x, float), np.asarray(a, float), np.asarray(b, float)
    )
    if np.any(np.isnan(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("reg_inc_beta: x must lie in [0, 1]")
    if np.any(~(a > 0.0)) or np.any(~(b > 0.0)):
        raise DomainError("reg_inc_beta: a and b must be positive")
    lower = np.empty(x.shape)
    upper = np.empty(x.shape)
    lower[x == 0.0] = 0.0
    upper[x == 0.0] = 1.0
    lower[x == 1.0] = 1.0
    upper[x == 1.0] = 0.0
    inner = (x > 0.0) & (x < 1.0)
    if np.any(inner):
        xi, ai, bi = x[inner], a[inner], b[inner]
        swap = xi > (ai + 1.0) / (ai + bi + 2.0)
        g, t = _centered(xi, ai, bi)
        lx = np.log(xi)
        ly = np.log1p(-xi)
        dx = g / t
        xs = np.where(swap, 1.0 - xi, xi)
        ys = np.where(swap, xi, 1.0 - xi)
        as_ = np.where(swap, bi, ai)
        bs = np.where(swap, ai, bi)
        lp = _log_prefactor(
            np.where(swap, ly, lx), np.where(swap, lx, ly),
            np.where(swap, -dx, dx), as_, bs,
        )
        # lambda = a - (a+b) x in the evaluated orientation
        lam = np.where(swap, g, -g)
        val = np.clip(np.exp(lp) * _betacf(xs, ys, as_, bs, lam), 0.0, 1.0)
        lower[inner] = np.where(swap, 1.0 - val, val)
        upper[inner] = np.where(swap, val, 1.0 - val)
    return lower, upper


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    This is the CDF of a Beta(a, b) variable evaluated at ``x``.

    Parameters
    ----------
    x : array_like
        Evaluation points in [0, 1].
    a, b : array_like
        Positive shape parameters.

    Returns
    -------
    float or ndarray
    """
    scalar = _is_scalar(x, a, b)
    return _out(_ibeta_pair(x, a, b)[0], scalar)


def beta_tails(x, a, b):
    """Both tails of Beta(a, b) at ``x``: (Pr(X <= x), Pr(X > x)).

    The smaller tail keeps full relative precision, which matters when a
    p-value is built from ``1 - cdf``.
    """
    scalar = _is_scalar(x, a, b)
    lo, up = _ibeta_pair(x, a, b)
    return _out(lo, scalar), _out(up, scalar)


def binom_cdf(k, n, p):
    """Pr(X <= k) for X ~ Binomial(n, p).

    Computed as ``I_{1-p}(n - k, k + 1)``. ``k < 0`` gives 0 and ``k >= n``
    gives 1.
    """
    scalar = _is_scalar(k, n, p)
    k, n, p = np.broadcast_arrays(
        np.asarray(k), np.asarray(n), np.asarray(p, float)
    )
    if np.any(np.asarray(n) < 1) or np.any(n != np.floor(n)):
        raise DomainError("binom_cdf: n must be a positive integer")
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("binom_cdf: p must lie in [0, 1]")
    k = np.floor(np.asarray(k, float))
    n = np.asarray(n, float)
    out = np.empty(k.shape)
    out[k < 0] = 0.0
    out[k >= n] = 1.0
    mid = (k >= 0) & (k < n)
    if np.any(mid):
        km, nm, pm = k[mid], n[mid], p[mid]
        out[mid] = reg_inc_beta(1.0 - pm, nm - km, km + 1.0)
    return _out(out, scalar)


def binom_tails(k, n, p):
    """(Pr(X <= k), Pr(X >= k)) for X ~ Binomial(n, p), both tails direct.

    ``n`` is a scalar here; ``k`` and ``p`` broadcast against each other.
    """
    scalar = _is_scalar(k, p)
    if n < 1 or int(n) != n:
        raise DomainError("binom_tails: n must be a positive integer")
    p_arr = np.asarray(p, float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
        raise DomainError("binom_tails: p must lie in [0, 1]")
    k = np.floor(np.asarray(k, float))
    k, p_arr = np.broadcast_arrays(k, p_arr)
    cdf = np.ones(k.shape)
    sf = np.ones(k.shape)
    cdf[k < 0] = 0.0
    sf[k > n] = 0.0
    # Pr(X <= k) = I_{1-p}(n-k, k+1) for 0 <= k < n
    mid = (k >= 0) & (k < n)
    if np.any(mid):
        cdf[mid] = _ibeta_pair(1.0 - p_arr[mid], n - k[mid], k[mid] + 1.0)[0]
    # Pr(X >= k) = I_p(k, n-k+1) for 1 <= k <= n
    hi = (k >= 1) & (k <= n)
    if np.any(hi):
        sf[hi] = _ibeta_pair(p_arr[hi], k[hi], n - k[hi] + 1.0)[0]
    return _out(cdf, scalar), _out(sf, scalar)


def binom_pmf(k, n, p):
    """Binomial probability mass, evaluated in log space."""
    scalar = _is_scalar(k, n, p)
    k, n, p = np.broadcast_arrays(
        np.asarray(k, float), np.asarray(n, float), np.asarray(p, float)
    )
    out = np.zeros(k.shape)
    ok = (k >= 0) & (k <= n)
    kk, nn, pp = k[ok], n[ok], p[ok]
    logc = _lgamma(nn + 1) - _lgamma(kk + 1) - _lgamma(nn - kk + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.where(kk > 0, kk * np.log(pp), 0.0)
        lq = np.where(nn - kk > 0, (nn - kk) * np.log1p(-pp), 0.0)
    out[ok] = np.exp(logc + lp + lq)
    return _out(out, scalar)


def cauchy_cdf(t):
    """Standard Cauchy CDF, 1/2 + arctan(t)/pi."""
    scalar = _is_scalar(t)
    t = np.asarray(t, float)
    return _out(0.5 + np.arctan(t) / math.pi, scalar)


def cauchy_sf(t):
    """Standard Cauchy upper tail 1 - F(t), accurate for large ``t``."""
    scalar = _is_scalar(t)
    t = np.asarray(t, float)
    return _out(np.arctan2(1.0, t) / math.pi, scalar)


def cauchy_quantile(p):
    """Inverse of :func:`cauchy_cdf` on the open interval (0, 1)."""
    scalar = _is_scalar(p)
    p = np.asarray(p, float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("cauchy_quantile: p must lie strictly inside (0, 1)")
    return _out(np.tan((p - 0.5) * math.pi), scalar)


def cauchy_transform(p):
    """Map p-values to standard Cauchy variates, tan((0.5 - p) pi).

    Uses the identity tan((0.5 - p) pi) = 1 / tan(p pi), which keeps full
    relative precision for p near 0. Requires 0 < p < 1.
    """
    scalar = _is_scalar(p)
    p = np.asarray(p, float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("cauchy_transform: p must lie strictly inside (0, 1)")
    lower = p <= 0.5
    q = np.where(lower, p, 1.0 - p)
    t = 1.0 / np.tan(q * math.pi)
    # exact zero at p = 1/2 (tan(pi/2) is finite in floating point)
    t = np.where(q == 0.5, 0.0, t)
    return _out(np.where(lower, t, -t), scalar)


def normal_cdf(z):
    """Standard normal CDF via the complementary error function."""
    scalar = _is_scalar(z)
    z = np.asarray(z, float)
    return _out(0.5 * _erfc(-z / math.sqrt(2.0)), scalar)


def normal_sf(z):
    """Standard normal upper tail 1 - Phi(z)."""
    scalar = _is_scalar(z)
    z = np.asarray(z, float)
    return _out(0.5 * _erfc(z / math.sqrt(2.0)), scalar)


_QA = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_QB = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_QC = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_QD = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


def _polyval(coefs, x):
    acc = np.zeros_like(x)
    for c in coefs:
        acc = acc * x + c
    return acc


def normal_quantile(p):
    """Standard normal quantile.

    Rational approximation (relative error ~1e-9) followed by one Halley
    step against :func:`normal_cdf`, or its upper tail for p > 1/2.
    """
    scalar = _is_scalar(p)
    p = np.asarray(p, float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("normal_quantile: p must lie strictly inside (0, 1)")
    # work with the lower-tail probability q = min(p, 1-p)
    upper = p > 0.5
    q = np.where(upper, 1.0 - p, p)
    x = np.empty_like(q)
    tail = q < _P_LOW
    if np.any(tail):
        r = np.sqrt(-2.0 * np.log(q[tail]))
        x[tail] = _polyval(_QC, r) / (_polyval(_QD, r) * r + 1.0)
    if np.any(~tail):
        r0 = q[~tail] - 0.5
        r2 = r0 * r0
        x[~tail] = _polyval(_QA, r2) * r0 / (_polyval(_QB, r2) * r2 + 1.0)
    # Halley refinement on the lower tail, where q is exact
    e = normal_cdf(x) - q
    u = e * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    return _out(np.where(upper, -x, x), scalar)


def student_t_cdf(t, nu):
    """Student-t CDF with ``nu`` degrees of freedom, via reg_inc_beta."""
    scalar = _is_scalar(t, nu)
    t, nu = np.broadcast_arrays(np.asarray(t, float), np.asarray(nu, float))
    if np.any(~(nu > 0.0)):
        raise DomainError("student_t_cdf: nu must be positive")
    tail = 0.5 * reg_inc_beta(nu / (nu + t * t), 0.5 * nu, 0.5)
    return _out(np.where(t > 0, 1.0 - tail, tail), scalar)


def exp_quantile(p, rate=1.0):
    """Quantile of the exponential distribution, -log(1 - p) / rate."""
    scalar = _is_scalar(p, rate)
    p = np.asarray(p, float)
    rate = np.asarray(rate, float)
    if np.any(~(rate > 0.0)):
        raise DomainError("exp_quantile: rate must be positive")
    if np.any(~((p >= 0.0) & (p < 1.0))):
        raise DomainError("exp_quantile: p must lie in [0, 1)")
    return _out(-np.log1p(-p) / rate, scalar)
