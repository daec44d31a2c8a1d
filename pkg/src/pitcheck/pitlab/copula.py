"""Dependent uniforms from a low-rank Gaussian copula.

Two structures are available. ``"shared"`` adds a common rank-p factor,

    z_i = l * s_i . w + sqrt(1 - l^2) * e_i,

with unit vectors s_i on a half-sphere, so the latent covariance is
(1/n) F F^T + D with rows f_i = l sqrt(n) s_i and D = (1 - l^2) I.
``"residual"`` removes a random p-dimensional subspace instead,
Cov = I - l^2 H with H the projection onto that subspace, which mimics
the negative, sum-constrained dependence of LOO-PIT values. Either way
u_i = Phi(z_i / sd_i) is exactly Uniform(0, 1) marginally.
"""

from dataclasses import dataclass, asdict
import math

import numpy as np

from .. import specfun
from ..errors import ConfigError
from ..pointwise import PitSample

__all__ = ["LowRankCopulaSpec", "copula_dependent_uniforms", "copula_correlation",
           "mean_uniform_correlation", "calibrate_loading_scale"]

MODES = ("shared", "residual")


@dataclass(frozen=True)
class LowRankCopulaSpec:
    n: int
    p: int = 1
    loading_scale: float = 0.5
    seed: int = 0
    mode: str = "shared"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("copula n must be a positive integer")
        if int(self.p) != self.p or self.p < 1:
            raise ConfigError("copula p must be a positive integer")
        if self.mode not in MODES:
            raise ConfigError(f"copula mode must be one of {MODES}, not {self.mode!r}")
        if not self.loading_scale >= 0:
            raise ConfigError("loading_scale must be nonnegative")
        if self.loading_scale >= 1.0:
            raise ConfigError(
                "loading_scale >= 1 leaves a nonpositive idiosyncratic variance"
            )

    def to_dict(self):
        return asdict(self)


def _directions(rng, n, p):
    s = rng.standard_normal((n, p))
    s /= np.linalg.norm(s, axis=1, keepdims=True)
    s[:, 0] = np.abs(s[:, 0])
    return s


def _basis(rng, n, p):
    q, _ = np.linalg.qr(rng.standard_normal((n, min(p, n))))
    return q


def _structure(spec, rng):
    if spec.mode == "shared":
        return _directions(rng, spec.n, spec.p)
    return _basis(rng, spec.n, spec.p)


def copula_correlation(spec):
    """Latent Gaussian correlation matrix implied by ``spec``."""
    ell = spec.loading_scale
    S = _structure(spec, np.random.default_rng(spec.seed))
    if spec.mode == "shared":
        C = ell ** 2 * (S @ S.T)
        np.fill_diagonal(C, 1.0)
        return C
    cov = np.eye(spec.n) - ell ** 2 * (S @ S.T)
    sd = np.sqrt(np.diag(cov))
    return cov / np.outer(sd, sd)


def copula_dependent_uniforms(spec, rng=None):
    """Draw one vector of n dependent Uniform(0, 1) values.

    The structure (directions or subspace) is fixed by ``spec.seed``; the
    latent noise comes from ``rng``, which defaults to a generator seeded
    with ``spec.seed`` as well.
    """
    S = _structure(spec, np.random.default_rng(spec.seed))
    rng = np.random.default_rng([spec.seed, 1]) if rng is None else rng
    ell = spec.loading_scale
    if spec.mode == "shared":
        w = rng.standard_normal(S.shape[1])
        z = ell * (S @ w) + math.sqrt(1.0 - ell * ell) * rng.standard_normal(spec.n)
    else:
        e = rng.standard_normal(spec.n)
        c = 1.0 - math.sqrt(1.0 - ell * ell)
        z = e - c * (S @ (S.T @ e))
        diag = 1.0 - ell * ell * np.sum(S * S, axis=1)
        if np.any(diag <= 0.0):
            raise ConfigError("nonpositive latent variance; reduce loading_scale")
        z = z / np.sqrt(diag)
    u = np.clip(specfun.normal_cdf(z), np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    return PitSample.continuous(u)


def mean_uniform_correlation(C):
    """Mean off-diagonal correlation of the uniforms for latent matrix C.

    Uses the Gaussian-copula identity rho_u = (6 / pi) asin(rho / 2).
    """
    n = C.shape[0]
    if n < 2:
        return 0.0
    off = C[~np.eye(n, dtype=bool)]
    return float(np.mean(6.0 / math.pi * np.arcsin(off / 2.0)))


def calibrate_loading_scale(n, p, target, seed=0, mode="shared", tol=1e-6):
    """Loading scale whose mean pairwise uniform correlation is ``target``
    for the structure fixed by ``seed``, found by bisection over [0, 1).

    For ``"shared"`` the target must be nonnegative, for ``"residual"``
    nonpositive.
    """
    S = _structure(LowRankCopulaSpec(n, p, 0.0, seed, mode), np.random.default_rng(seed))

    def corr(ell):
        if mode == "shared":
            C = ell ** 2 * (S @ S.T)
            np.fill_diagonal(C, 1.0)
        else:
            cov = np.eye(n) - ell ** 2 * (S @ S.T)
            sd = np.sqrt(np.diag(cov))
            C = cov / np.outer(sd, sd)
        return mean_uniform_correlation(C)

    lo, hi = 0.0, 1.0 - 1e-9
    f_hi = corr(hi)
    if (mode == "shared" and not 0.0 <= target <= f_hi) or (
        mode == "residual" and not f_hi <= target <= 0.0
    ):
        raise ConfigError(
            f"target correlation {target!r} not reachable (range 0 to {f_hi:.4g})"
        )
    sign = 1.0 if mode == "shared" else -1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sign * corr(mid) < sign * target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
