"""One entry point for every uniformity test in the package."""

from .baselines import ad_test, ks_test
from .combine import TestReport, combine_p
from .errors import PitError
from .pitos import pitos_test
from .pointwise import PitSample, pointwise

__all__ = ["uniformity_test", "pointwise_test", "ALL_METHODS", "POINTWISE_METHODS"]

POINTWISE_METHODS = ("potc", "pritc", "pietc")
ALL_METHODS = POINTWISE_METHODS + ("ks", "ad", "pitos")


def pointwise_test(sample, method, combiner="cct", alpha=0.05, *,
                   partition="auto", reference=None):
    """Run POT-C, PRIT-C or PIET-C and combine.

    Returns
    -------
    report : TestReport
    pw : PointwiseResult
    """
    pw = pointwise(sample, method, partition=partition, reference=reference)
    stat, p_star = combine_p(pw.p_values, combiner)
    flags = ("independence-assuming",) if combiner == "tippett" else ()
    report = TestReport(
        method=method, combiner=combiner, statistic=stat, global_p=p_star,
        alpha=alpha, n=sample.n, warnings=pw.warnings, flags=flags,
    )
    return report, pw


def uniformity_test(sample, method="potc", combiner="cct", alpha=0.05, *,
                    partition="auto", reference=None, pair_budget=None):
    """Test a PIT sample for uniformity with the named method.

    ``combiner`` only applies to the pointwise methods; KS and AD report
    ``"none"`` and PITOS always uses the Cauchy combination.
    """
    if not isinstance(sample, PitSample):
        sample = PitSample.continuous(sample)
    if method in POINTWISE_METHODS:
        return pointwise_test(sample, method, combiner, alpha,
                              partition=partition, reference=reference)[0]
    if method == "ks":
        return ks_test(sample, alpha)
    if method == "ad":
        return ad_test(sample, alpha)
    if method == "pitos":
        return pitos_test(sample, pair_budget, alpha)
    raise PitError(f"unknown method {method!r}; choose from {', '.join(ALL_METHODS)}")
