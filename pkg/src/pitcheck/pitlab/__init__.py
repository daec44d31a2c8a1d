"""Closed-form simulation lab for LOO-PIT dependence experiments."""

from .conjugate import (
    Normal, StudentT, LogNormal, GeneralizedNormal, BetaBinomial, NegBinomial,
    ConjugateHierSpec, fitted_hyper, simulate_data, exact_loo_pit,
    exact_posterior_pit, spp_pit, compute_pit, sample_generalized_normal,
)
from .copula import (
    LowRankCopulaSpec, copula_dependent_uniforms, copula_correlation,
    calibrate_loading_scale,
)
from .discrete import randomized_pit_discrete
from .harness import SimOutcome, run_experiment, replicate_rng
