"""Dependence-aware uniformity tests for PIT values.

Pointwise tests (POT-C, PRIT-C, PIET-C) with Cauchy combination,
Shapley-value influence attribution for ECDF plots, independence-assuming
baselines, and a closed-form simulation lab for LOO-PIT experiments.
"""

__version__ = "0.1.0"

from .errors import (
    PitError, DomainError, ConvergenceError, EmptySample, BoundaryValue,
    InvalidPartition, DegenerateP, NonFiniteInput, GammaOutOfRange,
    IndexMismatch, TieError, ConfigError, ExperimentAborted,
)
from .pointwise import (
    PitSample, PointwiseResult, Reference, exp_reference, normal_reference,
    custom_reference, parse_reference, rank_pit, potc_pointwise,
    pritc_pointwise, pietc_pointwise, uniform_partition,
)
from .combine import TestReport, cct, tcct, tippett_min_p, combine_p
from .influence import (
    InfluenceReport, shapley_values, influential_region, ecdf_plot_data,
    influence_report, auto_gamma,
)
from .baselines import ks_test, ad_test
from .pitos import pitos_test, conditional_p, pair_grid
from .uniformity import uniformity_test, pointwise_test
