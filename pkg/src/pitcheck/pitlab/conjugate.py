"""Conjugate hierarchical models with exact LOO-PIT, posterior PIT and SPP.

The fitted model for continuous data is

    y_ig ~ N(mu_g, sigma^2),   mu_g ~ N(mu0, tau^2)

with sigma, tau and mu0 known, so every leave-one-out posterior is normal
and the LOO predictive is available in closed form. Data can come from
misspecified generating processes (Student-t, lognormal, generalized
normal). Count data use the conjugate Beta-binomial and Gamma-Poisson
pairs with randomized PITs.
"""

from dataclasses import dataclass, field, asdict
import math

import numpy as np

from .. import specfun
from ..errors import ConfigError, PitError
from ..pointwise import PitSample
from .discrete import betabinom_cdf, binomial_cdf, negbin_cdf, poisson_cdf, randomized_pit_discrete

__all__ = [
    "Normal", "StudentT", "LogNormal", "GeneralizedNormal", "BetaBinomial",
    "NegBinomial", "ConjugateHierSpec", "FittedHyper", "fitted_hyper",
    "simulate_data", "exact_loo_pit", "exact_posterior_pit", "spp_pit",
    "compute_pit", "sample_generalized_normal",
]

# keep PITs inside the open unit interval after rounding
PIT_FLOOR = np.finfo(float).tiny
PIT_CEIL = 1.0 - np.finfo(float).epsneg


@dataclass(frozen=True)
class Normal:
    name = "normal"
    discrete = False


@dataclass(frozen=True)
class StudentT:
    nu: float
    name = "student_t"
    discrete = False

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigError("StudentT needs nu > 0")


@dataclass(frozen=True)
class LogNormal:
    sigma_log: float
    name = "lognormal"
    discrete = False

    def __post_init__(self):
        if not self.sigma_log > 0:
            raise ConfigError("LogNormal needs sigma_log > 0")


@dataclass(frozen=True)
class GeneralizedNormal:
    alpha: float
    beta: float
    name = "gennormal"
    discrete = False

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigError("GeneralizedNormal needs alpha > 0 and beta > 0")


@dataclass(frozen=True)
class BetaBinomial:
    N: int
    phi: float
    name = "betabinomial"
    discrete = True

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1 or not self.phi > 0:
            raise ConfigError("BetaBinomial needs integer N >= 1 and phi > 0")


@dataclass(frozen=True)
class NegBinomial:
    phi: float
    name = "negbinomial"
    discrete = True

    def __post_init__(self):
        if not self.phi > 0:
            raise ConfigError("NegBinomial needs phi > 0")


@dataclass(frozen=True)
class ConjugateHierSpec:
    """G groups of m observations from a hierarchical DGP.

    ``fit`` chooses the known hyperparameters of the fitted model:
    ``"moments"`` matches them to the population moments of the DGP
    (the within-group sd and the law of the group means), ``"nominal"``
    uses ``sigma``, ``tau`` and ``mu0`` as given. ``pit`` picks the PIT
    variant used by the harness. For count DGPs the group effect enters
    on the logit (binomial) or log (Poisson) scale.
    """

    G: int
    m: int
    sigma: float = 1.0
    tau: float = 1.0
    mu0: float = 0.0
    dgp: object = field(default_factory=Normal)
    seed: int = 0
    fit: str = "moments"
    pit: str = "loo"

    def __post_init__(self):
        if int(self.G) != self.G or int(self.m) != self.m or self.G < 1 or self.m < 1:
            raise ConfigError("G and m must be positive integers")
        if self.G * self.m < 2:
            raise ConfigError("need at least two observations in total (G*m >= 2)")
        if not (self.sigma > 0 and self.tau > 0):
            raise ConfigError("sigma and tau must be positive")
        if not math.isfinite(self.mu0):
            raise ConfigError("mu0 must be finite")
        if self.fit not in ("moments", "nominal"):
            raise ConfigError(f"fit must be 'moments' or 'nominal', not {self.fit!r}")
        if self.pit not in ("loo", "posterior", "spp"):
            raise ConfigError(f"pit must be loo, posterior or spp, not {self.pit!r}")
        if self.m == 1 and math.isinf(self.tau) and self.pit == "loo":
            raise ConfigError("m = 1 with an infinite tau leaves the LOO posterior improper")

    @property
    def n(self):
        return self.G * self.m

    def to_dict(self):
        d = asdict(self)
        d["dgp"] = {"family": self.dgp.name, **asdict(self.dgp)}
        return d


@dataclass(frozen=True)
class FittedHyper:
    """Known hyperparameters of the fitted conjugate model."""

    family: str  # "normal", "beta" (binomial) or "gamma" (Poisson)
    sigma: float = math.nan
    tau: float = math.nan
    mu0: float = math.nan
    a: float = math.nan
    b: float = math.nan
    N: int = 0


def _logit_normal_moments(mu0, tau):
    z, w = np.polynomial.hermite_e.hermegauss(80)
    w = w / w.sum()
    p = 1.0 / (1.0 + np.exp(-(mu0 + tau * z)))
    mean = float(np.dot(w, p))
    return mean, float(np.dot(w, (p - mean) ** 2))


def fitted_hyper(spec):
    """Hyperparameters of the fitted model implied by ``spec``."""
    d = spec.dgp
    if d.discrete:
        if isinstance(d, BetaBinomial):
            # Beta prior matched to the logit-normal law of the group probability
            mean, var = _logit_normal_moments(spec.mu0, spec.tau)
            k = mean * (1.0 - mean) / var - 1.0
            return FittedHyper("beta", a=mean * k, b=(1.0 - mean) * k, N=int(d.N))
        # Gamma prior matched to the lognormal law of the group rate
        mean = math.exp(spec.mu0 + 0.5 * spec.tau ** 2)
        var = math.expm1(spec.tau ** 2) * mean ** 2
        return FittedHyper("gamma", a=mean ** 2 / var, b=mean / var)
    if spec.fit == "nominal":
        return FittedHyper("normal", spec.sigma, spec.tau, spec.mu0)
    if isinstance(d, Normal):
        return FittedHyper("normal", spec.sigma, spec.tau, spec.mu0)
    if isinstance(d, StudentT):
        sd = spec.sigma * math.sqrt(d.nu / (d.nu - 2.0)) if d.nu > 2 else spec.sigma
        return FittedHyper("normal", sd, spec.tau, spec.mu0)
    if isinstance(d, GeneralizedNormal):
        sd = d.alpha * math.exp(0.5 * (math.lgamma(3.0 / d.beta) - math.lgamma(1.0 / d.beta)))
        return FittedHyper("normal", sd, spec.tau, spec.mu0)
    if isinstance(d, LogNormal):
        s2, t2 = d.sigma_log ** 2, spec.tau ** 2
        within = math.sqrt(math.expm1(s2) * math.exp(s2 + 2.0 * spec.mu0 + 2.0 * t2))
        gmean = math.exp(spec.mu0 + 0.5 * (t2 + s2))
        gsd = gmean * math.sqrt(math.expm1(t2))
        return FittedHyper("normal", within, gsd, gmean)
    raise ConfigError(f"unsupported DGP {d!r}")


def sample_generalized_normal(rng, alpha, beta, size):
    """Symmetric generalized normal draws, |x| = alpha * Gamma(1/beta)^(1/beta)."""
    g = rng.gamma(1.0 / beta, 1.0, size=size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return sign * alpha * g ** (1.0 / beta)


def simulate_data(spec, rng):
    """One G x m data set from the DGP of ``spec``."""
    G, m = spec.G, spec.m
    d = spec.dgp
    mu = spec.mu0 + spec.tau * rng.standard_normal(G)
    if isinstance(d, Normal):
        return mu[:, None] + spec.sigma * rng.standard_normal((G, m))
    if isinstance(d, StudentT):
        return mu[:, None] + spec.sigma * rng.standard_t(d.nu, size=(G, m))
    if isinstance(d, LogNormal):
        return np.exp(mu[:, None] + d.sigma_log * rng.standard_normal((G, m)))
    if isinstance(d, GeneralizedNormal):
        return mu[:, None] + sample_generalized_normal(rng, d.alpha, d.beta, (G, m))
    if isinstance(d, BetaBinomial):
        pg = 1.0 / (1.0 + np.exp(-mu))
        p = rng.beta(pg[:, None] * d.phi, (1.0 - pg[:, None]) * d.phi, size=(G, m))
        return rng.binomial(d.N, p).astype(float)
    if isinstance(d, NegBinomial):
        lam = np.exp(mu)[:, None]
        rate = rng.gamma(d.phi, lam / d.phi, size=(G, m))
        return rng.poisson(rate).astype(float)
    raise ConfigError(f"unsupported DGP {d!r}")


def _check_data(spec, data):
    y = np.asarray(data, dtype=float)
    if y.shape != (spec.G, spec.m):
        raise PitError(f"data must have shape ({spec.G}, {spec.m}), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise PitError("data contain non-finite values")
    return y


def _clip_pit(u):
    return np.clip(u, PIT_FLOOR, PIT_CEIL)


def _normal_predictive(h, y, leave_out):
    """Mean and sd of the (LOO or full) posterior of mu_g, per observation."""
    m = y.shape[1]
    tprec = 0.0 if math.isinf(h.tau) else h.tau ** -2
    k = m - 1 if leave_out else m
    if k == 0 and tprec == 0.0:
        raise PitError("improper posterior: m = 1 with an infinite tau")
    prec = tprec + k / h.sigma ** 2
    tot = y.sum(axis=1, keepdims=True)
    s = tot - y if leave_out else np.broadcast_to(tot, y.shape)
    mean = (tprec * h.mu0 + s / h.sigma ** 2) / prec
    return mean, 1.0 / prec


def _count_posterior(h, y, leave_out):
    m = y.shape[1]
    tot = y.sum(axis=1, keepdims=True)
    s = tot - y if leave_out else np.broadcast_to(tot, y.shape)
    k = m - 1 if leave_out else m
    if h.family == "beta":
        return h.a + s, h.b + k * h.N - s
    return h.a + s, h.b + k  # gamma shape, rate


def _count_predictive_pit(h, y, a, b, rng):
    if h.family == "beta":
        hi = betabinom_cdf(y, h.N, a, b)
        lo = betabinom_cdf(y - 1.0, h.N, a, b)
    else:
        prob = b / (b + 1.0)
        hi = negbin_cdf(y, a, prob)
        lo = negbin_cdf(y - 1.0, a, prob)
    return randomized_pit_discrete(hi, lo, rng.random(y.shape))


def _rng(rng):
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    return rng


def exact_loo_pit(spec, data, rng=None):
    """Closed-form LOO-PIT values, flattened group by group.

    For the normal model the LOO posterior of mu_g has precision
    tau^-2 + (m - 1) sigma^-2, and the predictive adds sigma^2 to its
    variance. Count models return randomized PITs, which need ``rng``.
    """
    y = _check_data(spec, data)
    h = fitted_hyper(spec)
    if h.family == "normal":
        mean, var = _normal_predictive(h, y, True)
        u = specfun.normal_cdf((y - mean) / np.sqrt(var + h.sigma ** 2))
    else:
        a, b = _count_posterior(h, y, True)
        u = _count_predictive_pit(h, y, a, b, _rng(rng))
    return PitSample.continuous(_clip_pit(u).ravel())


def exact_posterior_pit(spec, data, rng=None):
    """PIT against the full-data posterior predictive (uses y itself)."""
    y = _check_data(spec, data)
    h = fitted_hyper(spec)
    if h.family == "normal":
        mean, var = _normal_predictive(h, y, False)
        u = specfun.normal_cdf((y - mean) / np.sqrt(var + h.sigma ** 2))
    else:
        a, b = _count_posterior(h, y, False)
        u = _count_predictive_pit(h, y, a, b, _rng(rng))
    return PitSample.continuous(_clip_pit(u).ravel())


def spp_pit(spec, data, draw_seed=None):
    """Sampled-posterior PITs: one posterior draw of each group parameter.

    ``draw_seed`` may be an integer or a numpy Generator; a fixed integer
    makes the output reproducible bit for bit.
    """
    y = _check_data(spec, data)
    h = fitted_hyper(spec)
    rng = _rng(draw_seed)
    if h.family == "normal":
        mean, var = _normal_predictive(h, y, False)
        mu = mean[:, 0] + np.sqrt(var) * rng.standard_normal(spec.G)
        u = specfun.normal_cdf((y - mu[:, None]) / h.sigma)
    else:
        a, b = _count_posterior(h, y, False)
        a, b = a[:, 0], b[:, 0]
        if h.family == "beta":
            p = rng.beta(a, b)[:, None]
            hi = binomial_cdf(y, h.N, p)
            lo = binomial_cdf(y - 1.0, h.N, p)
        else:
            lam = rng.gamma(a, 1.0 / b)[:, None]
            hi = poisson_cdf(y, lam)
            lo = poisson_cdf(y - 1.0, lam)
        u = randomized_pit_discrete(hi, lo, rng.random(y.shape))
    return PitSample.continuous(_clip_pit(u).ravel())


def compute_pit(spec, data, rng=None):
    """PIT variant selected by ``spec.pit``."""
    if spec.pit == "loo":
        return exact_loo_pit(spec, data, rng)
    if spec.pit == "posterior":
        return exact_posterior_pit(spec, data, rng)
    return spp_pit(spec, data, rng)
