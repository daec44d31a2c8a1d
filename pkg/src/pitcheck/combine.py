"""Combining dependent pointwise p-values into one global p-value.

The Cauchy combination (CCT) averages ``tan((0.5 - p) pi)`` over the
pointwise p-values and reads the global p-value off the standard Cauchy
upper tail; its tail approximation is accurate under arbitrary dependence.
The truncated variant (TCCT) keeps only terms with p < 0.5. Tippett's
min-p rule is included as an independence-assuming baseline.
"""

from dataclasses import dataclass, field, asdict
import math

import numpy as np

from . import specfun
from .errors import DegenerateP, EmptySample, PitError

__all__ = [
    "TestReport",
    "cct",
    "tcct",
    "tippett_min_p",
    "combine_p",
    "COMBINERS",
]

COMBINERS = ("cct", "tcct", "tippett")
METHODS = ("potc", "pritc", "pietc", "ks", "ad", "pitos")


@dataclass
class TestReport:
    """Outcome of one uniformity test.

    ``reject`` is always ``global_p <= alpha``. ``extra`` holds
    method-specific values (for example the uncorrected PITOS p-value)
    and ``flags`` short labels such as ``"independence-assuming"``.
    """

    __test__ = False  # not a pytest class

    method: str
    combiner: str
    statistic: float
    global_p: float
    alpha: float
    n: int
    reject: bool = field(init=False)
    warnings: tuple = ()
    flags: tuple = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise PitError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not math.isfinite(self.statistic):
            raise PitError("test statistic is not finite")
        self.statistic = float(self.statistic)
        self.global_p = float(specfun.as_probability(self.global_p))
        self.reject = bool(self.global_p <= self.alpha)

    def to_dict(self):
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        d["flags"] = list(self.flags)
        return d


def _as_pvalues(p_values):
    p = np.asarray(p_values, dtype=float).ravel()
    if p.size == 0:
        raise EmptySample("no p-values to combine")
    return specfun.as_probability(p)


def cct(p_values):
    """Cauchy combination test.

    Parameters
    ----------
    p_values : array_like
        Pointwise p-values, each strictly inside (0, 1).

    Returns
    -------
    T : float
        Mean of the Cauchy transforms ``tan((0.5 - p) pi)``.
    p_star : float
        Upper standard-Cauchy tail probability at ``T``.
    """
    p = _as_pvalues(p_values)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise DegenerateP()
    T = float(np.mean(specfun.cauchy_transform(p)))
    return T, float(specfun.cauchy_sf(T))


def tcct(p_values):
    """Truncated Cauchy combination: only p < 0.5 contribute to the sum.

    The sum is still divided by the full count, so ``T >= 0`` and
    ``p_star <= 0.5``. A p-value of exactly 1 is allowed; 0 is not.
    """
    p = _as_pvalues(p_values)
    if np.any(p <= 0.0):
        raise DegenerateP()
    keep = p < 0.5
    T = float(np.sum(specfun.cauchy_transform(p[keep])) / p.size) if keep.any() else 0.0
    return T, float(specfun.cauchy_sf(T))


def tippett_min_p(p_values):
    """Tippett's minimum-p rule, ``1 - (1 - min p)^n``.

    Valid only for independent p-values; kept as a baseline.
    """
    p = _as_pvalues(p_values)
    pmin = float(p.min())
    with np.errstate(divide="ignore"):
        p_star = -math.expm1(p.size * float(np.log1p(-pmin))) if pmin < 1.0 else 1.0
    return pmin, p_star


_DISPATCH = {"cct": cct, "tcct": tcct, "tippett": tippett_min_p}


def combine_p(p_values, combiner="cct"):
    """Apply the named combiner; returns ``(statistic, p_star)``."""
    try:
        fn = _DISPATCH[combiner]
    except KeyError:
        raise PitError(
            f"unknown combiner {combiner!r}; choose from {', '.join(COMBINERS)}"
        ) from None
    return fn(p_values)
