"""Partial-sum ladders, convergence verdicts and the threshold search.

Whether the double series converges at a given exponent beta is judged from a
geometric ladder of partial sums: fit the growth of the increments and demand
a clear margin before declaring either way.  Near the threshold the honest
outcome is "inconclusive"; the bisection treats those points as terminal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .powerfit import fit_power_law

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"

# Margins of the ternary rule: increments decaying faster than M^-0.1 read as
# convergent, unbounded growth with increment exponent above -0.05 as
# divergent, everything else as inconclusive.
CONV_EXPONENT = -0.1
DIV_EXPONENT = -0.05
GROWTH_FLOOR = 0.05

_CHUNK = 512


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Ternary outcome of a truncation-ladder diagnosis."""

    verdict: str
    tail_exponent: float
    ladder: tuple

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tail_exponent": float(self.tail_exponent),
            "ladder": [[float(a), float(b)] for a, b in self.ladder],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceVerdict":
        return cls(
            verdict=d["verdict"],
            tail_exponent=float(d["tail_exponent"]),
            ladder=tuple((float(a), float(b)) for a, b in d["ladder"]),
        )


def ladder_verdict(radii, partials) -> ConvergenceVerdict:
    """Classify a monotone partial-value ladder as convergent/divergent/neither.

    The tail exponent is the OLS slope of ln(increment) against ln(radius).
    Divergence additionally requires visible growth (every one of the last
    three rungs adds at least 5%), which keeps slowly-converging ladders just
    above a threshold from being misread as divergent.
    """
    radii = [float(x) for x in radii]
    partials = [float(v) for v in partials]
    if len(radii) != len(partials) or len(radii) < 4:
        raise DomainError("need at least 4 ladder rungs")
    ladder = tuple(zip(radii, partials))
    incs = [b - a for a, b in zip(partials, partials[1:])]
    pts = [
        (math.log(radii[i + 1]), math.log(inc))
        for i, inc in enumerate(incs)
        if inc > 0
    ]
    rho = fit_power_law(pts).slope if len(pts) >= 2 else -math.inf
    growth = [
        incs[i] / partials[i] if partials[i] > 0 else math.inf
        for i in range(len(incs))
    ]
    growing = all(g > GROWTH_FLOOR for g in growth[-3:])
    if rho > DIV_EXPONENT and growing:
        verdict = DIVERGENT
    elif rho < CONV_EXPONENT and not growing:
        verdict = CONVERGENT
    else:
        verdict = INCONCLUSIVE
    return ConvergenceVerdict(verdict=verdict, tail_exponent=rho, ladder=ladder)


def _truncation_ladder(m_max: int, base: int = 16) -> list:
    rungs = [base]
    while rungs[-1] * 2 <= m_max:
        rungs.append(rungs[-1] * 2)
    if rungs[-1] != m_max:
        rungs.append(m_max)
    return rungs


def _series_partials(alpha1: float, alpha2: float, k: int, beta: float, rungs) -> list:
    """Partial sums over [1, M]^2 of the closed-form surrogate series."""
    exponent = k - (k - 1) * (1.0 / alpha1 + 1.0 / alpha2)
    m_max = rungs[-1]
    idx = np.arange(1, m_max + 1, dtype=float)
    pa1 = idx ** alpha1
    pa2 = idx ** alpha2
    pb = idx ** beta

    def rect_sum(rows, cols) -> float:
        # sum over m in rows, n in cols of (m^b + n^b)^-1 * (m^a1 + n^a2)^-E
        out = 0.0
        for lo in range(0, len(rows), _CHUNK):
            rr = rows[lo : lo + _CHUNK]
            t = (pb[rr][:, None] + pb[cols][None, :]) * (
                (pa1[rr][:, None] + pa2[cols][None, :]) ** exponent
            )
            out += float(np.sum(1.0 / t))
        return out

    partials = []
    total = 0.0
    prev = 0
    for m in rungs:
        new = np.arange(prev, m)  # zero-based indices prev..m-1
        old = np.arange(0, prev)
        total += rect_sum(new, np.arange(0, m))
        if prev:
            total += rect_sum(old, new)
        partials.append(total)
        prev = m
    return partials


def series_threshold_scan(
    alpha1: float, alpha2: float, k: int, beta_grid, m_max: int
) -> list:
    """Verdict per beta for the surrogate double series, truncation up to m_max.

    The region integral inside the exact series is replaced by its closed-form
    power surrogate, which is the same reduction the threshold formula rests
    on.  Returns [(beta, ConvergenceVerdict)] in grid order.
    """
    if not (2 >= alpha1 >= alpha2 > 0):
        raise DomainError(f"need 2 >= alpha1 >= alpha2 > 0, got ({alpha1}, {alpha2})")
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if m_max < 1000:
        raise DomainError(f"m_max must be at least 1000, got {m_max}")
    betas = [float(b) for b in beta_grid]
    if any(not (0 < b <= 2) for b in betas):
        raise DomainError("beta grid must lie in (0, 2]")
    rungs = _truncation_ladder(int(m_max))
    out = []
    for beta in betas:
        partials = _series_partials(alpha1, alpha2, k, beta, rungs)
        out.append((beta, ladder_verdict(rungs, partials)))
    return out


@dataclass(frozen=True)
class ThresholdEstimate:
    """Bisection result: the estimate plus the certain bracket around it.

    ``low`` is the largest beta seen to diverge, ``high`` the smallest seen to
    converge; inconclusive scans near the threshold widen the bracket instead
    of being silently resolved.
    """

    value: float
    low: float
    high: float
    n_scans: int

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "low": float(self.low),
            "high": float(self.high),
            "n_scans": int(self.n_scans),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdEstimate":
        return cls(
            value=float(d["value"]),
            low=float(d["low"]),
            high=float(d["high"]),
            n_scans=int(d["n_scans"]),
        )


def estimate_beta_threshold(
    alpha1: float, alpha2: float, k: int, tol: float, m_max: int = 16384
) -> ThresholdEstimate:
    """Bisect the convergence threshold of the surrogate series over (0, 2].

    Decisive verdicts move the bracket; an inconclusive midpoint triggers one
    probe at each quartile, and if neither is decisive the search stops with
    the bracket as the reported uncertainty.  When every scan converges the
    lower edge 0 is reported; when every scan diverges, the upper edge 2.
    """
    if tol < 0.05:
        raise DomainError(f"tol must be at least 0.05, got {tol}")

    lo, hi = 0.0, 2.0
    saw_div = False
    saw_conv = False
    n_scans = 0

    def scan(beta: float) -> str:
        nonlocal n_scans
        n_scans += 1
        (_, v), = series_threshold_scan(alpha1, alpha2, k, [beta], m_max)
        return v.verdict

    # Edge probe: a series divergent at beta = 2 never converges on the grid.
    top = scan(2.0)
    if top == DIVERGENT:
        return ThresholdEstimate(value=2.0, low=2.0, high=2.0, n_scans=n_scans)
    if top == CONVERGENT:
        saw_conv = True
        hi = 2.0

    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        v = scan(mid)
        if v == DIVERGENT:
            lo, saw_div = mid, True
        elif v == CONVERGENT:
            hi, saw_conv = mid, True
        else:
            moved = False
            q1 = lo + 0.25 * (hi - lo)
            q3 = lo + 0.75 * (hi - lo)
            v1 = scan(q1)
            if v1 == DIVERGENT:
                lo, saw_div, moved = q1, True, True
            elif v1 == CONVERGENT:
                hi, saw_conv, moved = q1, True, True
            if hi > q3:
                v3 = scan(q3)
                if v3 == DIVERGENT and q3 > lo:
                    lo, saw_div, moved = q3, True, True
                elif v3 == CONVERGENT:
                    hi, saw_conv, moved = q3, True, True
            if not moved:
                break  # threshold buried in the inconclusive band

    if saw_conv and not saw_div:
        value = lo  # threshold at or below the grid edge
    elif saw_div and not saw_conv:
        value = hi
    else:
        value = 0.5 * (lo + hi)
    return ThresholdEstimate(value=value, low=lo, high=hi, n_scans=n_scans)
