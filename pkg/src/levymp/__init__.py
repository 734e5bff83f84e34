"""Hausdorff dimension and existence toolkit for multiple points of symmetric
operator semistable Levy processes, with numerical verification of the
underlying integral and series asymptotics."""

from .closedform import DimensionReport, beta_threshold_R2, exists_multiple, hausdorff_dim_R2
from .errors import (
    AmbiguousJordan,
    DomainError,
    LevyMPError,
    NonFullSpectrum,
    ProposalMismatch,
    UnsupportedCase,
    ValidityError,
)
from .estimator import (
    ConvergenceVerdict,
    IntegralEstimate,
    PowerLawFit,
    ThresholdEstimate,
    asymptotic_exponent_fit,
    estimate_beta_threshold,
    intersection_integral_verdict,
    mc_region_integral,
    series_threshold_scan,
)
from .kernels import KernelSpec, RegionSpec, kernel_eval, multipoint_integrand, region_membership
from .pathsim import PathSample, close_approach_scan, scaling_check, simulate_diagonal_stable
from .spectral import (
    SpectralProfile,
    StabilityExponent,
    classify_exponent,
    diagonal_profile,
    matrix_power_cB,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousJordan",
    "ConvergenceVerdict",
    "DimensionReport",
    "DomainError",
    "IntegralEstimate",
    "KernelSpec",
    "LevyMPError",
    "NonFullSpectrum",
    "PathSample",
    "PowerLawFit",
    "ProposalMismatch",
    "RegionSpec",
    "SpectralProfile",
    "StabilityExponent",
    "ThresholdEstimate",
    "UnsupportedCase",
    "ValidityError",
    "asymptotic_exponent_fit",
    "beta_threshold_R2",
    "classify_exponent",
    "close_approach_scan",
    "diagonal_profile",
    "estimate_beta_threshold",
    "exists_multiple",
    "hausdorff_dim_R2",
    "intersection_integral_verdict",
    "kernel_eval",
    "matrix_power_cB",
    "mc_region_integral",
    "multipoint_integrand",
    "region_membership",
    "scaling_check",
    "series_threshold_scan",
    "simulate_diagonal_stable",
]
