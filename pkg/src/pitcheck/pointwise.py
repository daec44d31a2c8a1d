"""Pointwise p-values for the POT-C, PRIT-C and PIET-C uniformity tests.

Each procedure turns a sample of PIT values into one p-value per tested
quantity (order statistic, partition point or observation). The p-values
are marginally valid but dependent; :mod:`pitcheck.combine` aggregates them.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import specfun
from .errors import BoundaryValue, EmptySample, InvalidPartition, PitError

__all__ = [
    "PitSample",
    "PointwiseResult",
    "Reference",
    "exp_reference",
    "normal_reference",
    "custom_reference",
    "rank_pit",
    "potc_pointwise",
    "pritc_pointwise",
    "pietc_pointwise",
    "auto_partition",
    "uniform_partition",
]

CONTINUOUS = "continuous"
RANK = "rank"

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class PitSample:
    """PIT values in [0, 1] plus how they were computed.

    ``kind`` is ``"continuous"`` for PITs from a predictive CDF, or
    ``"rank"`` for normalized ranks against ``draws`` predictive draws, in
    which case every value lies on the grid {0, 1/draws, ..., 1}.
    """

    values: np.ndarray
    kind: str = CONTINUOUS
    draws: int | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise EmptySample("a PIT sample needs at least one value")
        v = specfun.as_probability(v)
        if self.kind == RANK:
            if self.draws is None or int(self.draws) != self.draws or self.draws < 1:
                raise PitError("rank-based samples need a positive integer `draws`")
            scaled = v * self.draws
            k = np.rint(scaled)
            if np.any(np.abs(scaled - k) > _GRID_TOL * self.draws):
                raise PitError(
                    f"rank-based PIT values must lie on the grid k/{self.draws}"
                )
            v = k / self.draws
            object.__setattr__(self, "draws", int(self.draws))
        elif self.kind == CONTINUOUS:
            if self.draws is not None:
                raise PitError("`draws` only applies to rank-based samples")
        else:
            raise PitError(f"unknown sample kind {self.kind!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def continuous(cls, values):
        return cls(values, CONTINUOUS)

    @classmethod
    def rank_based(cls, values, draws):
        return cls(values, RANK, draws)

    @property
    def n(self):
        return self.values.size

    @property
    def is_continuous(self):
        return self.kind == CONTINUOUS

    def order(self):
        """Stable argsort of the values (ties keep input order)."""
        return np.argsort(self.values, kind="stable")


def rank_pit(predictive_draws, y):
    """Rank-based PIT values from predictive draws.

    ``predictive_draws`` has shape (draws, n); the PIT of observation i is
    the fraction of draws in column i that are <= ``y[i]``.
    """
    draws = np.asarray(predictive_draws, dtype=float)
    y = np.asarray(y, dtype=float)
    if draws.ndim != 2 or draws.shape[1] != y.size:
        raise PitError("predictive_draws must have shape (draws, n) matching y")
    counts = np.sum(draws <= y[None, :], axis=0)
    return PitSample.rank_based(counts / draws.shape[0], draws.shape[0])


@dataclass(frozen=True)
class PointwiseResult:
    """Pointwise p-values and their Cauchy transforms.

    ``indexing`` says what position k in ``p_values`` refers to: the k-th
    order statistic (``"sorted"``), the k-th input observation
    (``"input"``) or the k-th partition point (``"partition"``).
    ``index_map`` is the stable argsort of the sample, so ``index_map[k]``
    is the input position of the k-th smallest value.
    """

    method: str
    p_values: np.ndarray
    tested_quantity: np.ndarray
    cauchy_t: np.ndarray
    index_map: np.ndarray
    indexing: str
    partition: np.ndarray | None = None
    warnings: tuple = field(default_factory=tuple)

    @property
    def size(self):
        return self.p_values.size


def _cauchy_terms(p):
    t = np.empty_like(p)
    inside = (p > 0.0) & (p < 1.0)
    t[inside] = specfun.cauchy_transform(p[inside])
    t[p <= 0.0] = np.inf
    t[p >= 1.0] = -np.inf
    return t


def _two_sided(lower, upper):
    return np.minimum(1.0, 2.0 * np.minimum(lower, upper))


def _check_open(values):
    if np.any(values <= 0.0) or np.any(values >= 1.0):
        raise BoundaryValue()


def _kind_warning(sample, wanted, method):
    if sample.kind != wanted:
        return (
            f"method/kind mismatch: {method} expects {wanted} PIT values, "
            f"got {sample.kind}",
        )
    return ()


def potc_pointwise(sample):
    """Beta-distribution p-values for each order statistic.

    The i-th smallest of n uniform values is Beta(i, n + 1 - i); the
    p-value doubles the smaller tail probability and is capped at 1.
    Results are indexed by order statistic.
    """
    warn = _kind_warning(sample, CONTINUOUS, "potc")
    _check_open(sample.values)
    order = sample.order()
    u = sample.values[order]
    n = u.size
    i = np.arange(1, n + 1, dtype=float)
    cdf, sf = specfun.beta_tails(u, i, n + 1.0 - i)
    p = _two_sided(cdf, sf)
    return PointwiseResult(
        method="potc",
        p_values=p,
        tested_quantity=u,
        cauchy_t=_cauchy_terms(p),
        index_map=order,
        indexing="sorted",
        warnings=warn,
    )


def auto_partition(sample):
    """Default PRIT-C partition for rank-based samples.

    Uses the interior rank-grid points 1/S, ..., (S-1)/S; when there are
    more than n of them, n are taken at evenly spaced grid indices.
    """
    if sample.kind != RANK:
        raise InvalidPartition(
            "an explicit partition is required for continuous samples"
        )
    S = sample.draws
    if S < 2:
        raise InvalidPartition("rank grid with draws < 2 has no interior points")
    k = np.arange(1, S)
    if k.size > sample.n:
        idx = np.unique(np.rint(np.linspace(0, k.size - 1, sample.n)).astype(int))
        k = k[idx]
    return k / S


def uniform_partition(size):
    """Evenly spaced interior points i / (size + 1), i = 1..size."""
    if size < 1:
        raise InvalidPartition("partition size must be positive")
    return np.arange(1, size + 1) / (size + 1.0)


def pritc_pointwise(sample, partition="auto"):
    """Binomial p-values for the scaled ECDF at each partition point.

    At partition point z the count #{u_j <= z} is Binomial(n, z) under
    uniformity. The p-value doubles the smaller of Pr(X <= c) and
    Pr(X >= c), capped at 1. Results are indexed by partition point.
    """
    warn = _kind_warning(sample, RANK, "pritc")
    if isinstance(partition, str):
        if partition != "auto":
            raise InvalidPartition(f"unknown partition policy {partition!r}")
        z = auto_partition(sample)
    else:
        z = np.asarray(partition, dtype=float).ravel()
    if z.size == 0:
        raise InvalidPartition("partition is empty")
    if np.any(z <= 0.0) or np.any(z >= 1.0) or np.any(np.diff(z) <= 0.0):
        raise InvalidPartition(
            "partition points must be strictly increasing inside (0, 1)"
        )
    order = sample.order()
    u = sample.values[order]
    n = u.size
    counts = np.searchsorted(u, z, side="right").astype(float)
    lower, upper = specfun.binom_tails(counts, n, z)
    p = _two_sided(lower, upper)
    return PointwiseResult(
        method="pritc",
        p_values=p,
        tested_quantity=counts,
        cauchy_t=_cauchy_terms(p),
        index_map=order,
        indexing="partition",
        partition=z,
        warnings=warn,
    )


@dataclass(frozen=True)
class Reference:
    """A continuous reference law for PIET-C.

    ``ppf`` maps u to the pseudo-value; ``cdf`` and ``sf`` give its two
    tail probabilities. Symmetric references (about 0) use the
    absolute-value form of the p-value.
    """

    name: str
    ppf: object
    cdf: object
    sf: object
    symmetric: bool = False


def exp_reference(rate=1.0):
    if not rate > 0:
        raise PitError("exponential reference needs a positive rate")
    return Reference(
        name=f"exp:{rate:g}",
        ppf=lambda u: specfun.exp_quantile(u, rate),
        cdf=lambda x: -np.expm1(-rate * np.asarray(x)),
        sf=lambda x: np.exp(-rate * np.asarray(x)),
    )


def normal_reference():
    return Reference(
        name="normal",
        ppf=specfun.normal_quantile,
        cdf=specfun.normal_cdf,
        sf=specfun.normal_sf,
        symmetric=True,
    )


def custom_reference(ppf, sf, symmetric=False, name="custom"):
    """Reference from a user-supplied inverse CDF and upper-tail function."""
    return Reference(
        name=name,
        ppf=ppf,
        cdf=lambda x: 1.0 - np.asarray(sf(x), dtype=float),
        sf=sf,
        symmetric=symmetric,
    )


def pietc_pointwise(sample, reference=None):
    """p-values from pseudo-values pushed through a reference inverse CDF.

    With an asymmetric reference (default Exp(1)) the p-value is twice the
    smaller tail probability of the pseudo-value; with a symmetric one it
    is 2 Pr(X > |pseudo-value|). Input order is preserved.
    """
    if reference is None:
        reference = exp_reference(1.0)
    warn = _kind_warning(sample, CONTINUOUS, "pietc")
    _check_open(sample.values)
    u = sample.values
    x = np.asarray(reference.ppf(u), dtype=float)
    if reference.symmetric:
        p = np.minimum(1.0, 2.0 * np.asarray(reference.sf(np.abs(x)), dtype=float))
    else:
        p = _two_sided(
            np.asarray(reference.cdf(x), dtype=float),
            np.asarray(reference.sf(x), dtype=float),
        )
    p = np.clip(p, 0.0, 1.0)
    return PointwiseResult(
        method="pietc",
        p_values=p,
        tested_quantity=x,
        cauchy_t=_cauchy_terms(p),
        index_map=sample.order(),
        indexing="input",
        warnings=warn,
    )


def pointwise(sample, method, *, partition="auto", reference=None):
    """Dispatch to one of the three pointwise procedures by name."""
    if method == "potc":
        return potc_pointwise(sample)
    if method == "pritc":
        return pritc_pointwise(sample, partition)
    if method == "pietc":
        return pietc_pointwise(sample, reference)
    raise PitError(f"unknown pointwise method {method!r}")


def parse_reference(text):
    """Parse ``"exp:<rate>"``, ``"exp"`` or ``"normal"``."""
    text = text.strip().lower()
    if text == "normal":
        return normal_reference()
    if text == "exp":
        return exp_reference(1.0)
    if text.startswith("exp:"):
        try:
            rate = float(text[4:])
        except ValueError:
            raise PitError(f"bad exponential rate in {text!r}") from None
        if not math.isfinite(rate):
            raise PitError(f"bad exponential rate in {text!r}")
        return exp_reference(rate)
    raise PitError(f"unknown reference {text!r}; use exp:<rate> or normal")
