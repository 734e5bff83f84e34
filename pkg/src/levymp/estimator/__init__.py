"""Numerical verification of the integral and series asymptotics."""

from .intersection import intersection_integral_verdict, intersection_scan
from .powerfit import PowerLawFit, asymptotic_exponent_fit, fit_power_law, predicted_exponent
from .region import IntegralEstimate, mc_region_integral
from .rng import BLOCK_SIZE, MixtureProposal, block_generator, resolve_threads
from .series import (
    CONVERGENT,
    DIVERGENT,
    INCONCLUSIVE,
    ConvergenceVerdict,
    ThresholdEstimate,
    estimate_beta_threshold,
    ladder_verdict,
    series_threshold_scan,
)

__all__ = [
    "BLOCK_SIZE",
    "CONVERGENT",
    "DIVERGENT",
    "INCONCLUSIVE",
    "ConvergenceVerdict",
    "IntegralEstimate",
    "MixtureProposal",
    "PowerLawFit",
    "ThresholdEstimate",
    "asymptotic_exponent_fit",
    "block_generator",
    "estimate_beta_threshold",
    "fit_power_law",
    "intersection_integral_verdict",
    "intersection_scan",
    "ladder_verdict",
    "mc_region_integral",
    "predicted_exponent",
    "resolve_threads",
    "series_threshold_scan",
]
