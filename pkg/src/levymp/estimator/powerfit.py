"""Log-log slope fitting for the region-integral asymptotics.

The two-sided comparability claims are checked numerically by estimating the
region integral along a geometric (q, r) ladder and fitting the log of the
estimate against the log of the predicted scale variable by ordinary least
squares.  The slope is the empirical exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError, ValidityError
from ..kernels import ANISOTROPIC, LOG_CORRECTED, TRUE_EXPONENT, KernelSpec, RegionSpec
from .region import mc_region_integral

DIRECTIONS = ("q_axis", "r_axis", "diagonal")


@dataclass(frozen=True)
class PowerLawFit:
    """OLS fit of log-ordinate against log-abscissa."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple

    def to_dict(self) -> dict:
        return {
            "slope": float(self.slope),
            "intercept": float(self.intercept),
            "r_squared": float(self.r_squared),
            "points": [[float(x), float(y)] for x, y in self.points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PowerLawFit":
        return cls(
            slope=float(d["slope"]),
            intercept=float(d["intercept"]),
            r_squared=float(d["r_squared"]),
            points=tuple((float(x), float(y)) for x, y in d["points"]),
        )


def fit_power_law(points) -> PowerLawFit:
    """Least squares on already-logged (x, y) pairs, with honest r^2."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise DomainError("need at least two points to fit a slope")
    n = len(pts)
    mx = math.fsum(x for x, _ in pts) / n
    my = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in pts)
    sxy = math.fsum((x - mx) * (y - my) for x, y in pts)
    if sxx == 0:
        raise DomainError("abscissa values are all identical")
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in pts)
    ss_tot = math.fsum((y - my) ** 2 for _, y in pts)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(slope=slope, intercept=intercept, r_squared=r2, points=tuple(pts))


def predicted_exponent(kernel: KernelSpec, k: int) -> float:
    """The exponent the fit should recover for this kernel family."""
    if kernel.variant == LOG_CORRECTED:
        alpha = kernel.alphas[0]
        return -(2.0 - k * (2.0 - alpha))
    a1, a2 = kernel.alphas
    return (k - 1) * (1.0 / a1 + 1.0 / a2) - k


def check_fit_validity(kernel: KernelSpec, k: int):
    """Hypotheses under which the ladder has a clean power-law limit."""
    if kernel.variant == LOG_CORRECTED:
        alpha = kernel.alphas[0]
        if not (2.0 * (k - 1) / k < alpha < 2.0):
            raise ValidityError(
                f"log-corrected asymptotics need 2(k-1)/k < alpha < 2, got alpha={alpha}, k={k}"
            )
        return
    a1, a2 = kernel.alphas
    if a1 == 2.0 and a2 == 2.0:
        raise ValidityError("corner case alpha1 = alpha2 = 2 carries a log factor; excluded")
    if a1 == 2.0 and a2 == 1.0:
        raise ValidityError("corner case alpha1 = 2, alpha2 = 1 carries a log factor; excluded")
    if k - (k - 1) * (1.0 / a1 + 1.0 / a2) <= 0:
        raise ValidityError(
            f"region integral is infinite for k={k}, alphas={kernel.alphas}"
        )


def scale_abscissa(kernel: KernelSpec, q: float, r: float) -> float:
    """ln of the predicted scale variable: q^a1 + r^a2, or q v (r ln r)."""
    if kernel.variant == LOG_CORRECTED:
        return math.log(max(q, r * math.log(r)))
    a1, a2 = kernel.alphas
    return math.log(q ** a1 + r ** a2)


def log_correction(kernel: KernelSpec, k: int, q: float, r: float) -> float:
    """ln of the known logarithmic correction to divide out of the estimate."""
    if kernel.variant == LOG_CORRECTED and k >= 2:
        return (k - 1) * math.log(math.log(max(q, r)))
    return 0.0


def region_ladder(
    kernel: KernelSpec, k: int, ladder, n_per_point: int, seed: int, *, max_threads=None
):
    """One region-integral estimate per (q, r) rung, stream keyed by rung index."""
    log_mode = kernel.variant == LOG_CORRECTED
    out = []
    for i, (q, r) in enumerate(ladder):
        region = RegionSpec(k=k, q=float(q), r=float(r), log_variant=log_mode)
        out.append(
            mc_region_integral(
                kernel, region, n_per_point, seed, stream=i, max_threads=max_threads
            )
        )
    return out


def fit_from_estimates(kernel: KernelSpec, k: int, estimates) -> PowerLawFit:
    """OLS on the logged estimates against the predicted scale variable,
    with the known logarithmic correction divided out."""
    points = []
    for est in estimates:
        q, r = est.region.q, est.region.r
        if est.value <= 0:
            raise ValidityError(
                f"nonpositive estimate {est.value} at (q, r)=({q}, {r}); cannot take logs"
            )
        x = scale_abscissa(kernel, q, r)
        y = math.log(est.value) + log_correction(kernel, k, q, r)
        points.append((x, y))
    return fit_power_law(points)


def asymptotic_exponent_fit(
    kernel: KernelSpec,
    k: int,
    direction: str,
    ladder,
    n_per_point: int,
    seed: int,
    *,
    max_threads=None,
) -> PowerLawFit:
    """Fit the empirical region-integral exponent along a (q, r) ladder.

    ``ladder`` is a sequence of (q, r) pairs, at least five, geometrically
    spread along the chosen direction.  Each point gets its own random stream
    derived from (seed, point index).  The slope of the returned fit estimates
    the exponent reported by ``predicted_exponent``.
    """
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    pairs = [(float(q), float(r)) for q, r in ladder]
    if len(pairs) < 5:
        raise DomainError("ladder needs at least 5 points")
    if kernel.variant not in (ANISOTROPIC, LOG_CORRECTED, TRUE_EXPONENT):
        raise DomainError(f"unsupported kernel variant {kernel.variant!r}")
    check_fit_validity(kernel, k)
    estimates = region_ladder(
        kernel, k, pairs, n_per_point, seed, max_threads=max_threads
    )
    return fit_from_estimates(kernel, k, estimates)
