"""Integrand families and integration regions for the convergence criteria.

The anisotropic kernel kappa(x) = sum_j |x_j|**alpha_j stands in for 1 + Psi
at infinity; the log-corrected planar variant
kappa(x) = |x1|**a + |x2|**a * ln(||x||)**a covers the non-diagonalizable
case and is only defined for ||x|| >= e so the logarithm stays >= 1.
Regions are the shell-constrained sets over which the key integrals run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ANISOTROPIC = "anisotropic"
LOG_CORRECTED = "log_corrected"
TRUE_EXPONENT = "true_exponent"

_VARIANTS = (ANISOTROPIC, LOG_CORRECTED, TRUE_EXPONENT)


@dataclass(frozen=True)
class KernelSpec:
    """An even kernel family comparable to 1 + Psi outside a cutoff radius.

    variant:
      - "anisotropic":   kappa(x) = sum |x_j|**alpha_j
      - "log_corrected": kappa(x) = |x1|**a + |x2|**a * ln(||x||)**a, d=2 only,
                         requires alpha1 == alpha2 and ||x|| >= e
      - "true_exponent": kappa(x) = sum c_j |x_j|**alpha_j (diagonal symmetric
                         stable example), coefficients required
    """

    variant: str
    alphas: tuple
    cutoff_radius: float = 1.0
    coefficients: tuple | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise DomainError(f"unknown kernel variant {self.variant!r}")
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas or any(not (0 < a <= 2) for a in alphas):
            raise DomainError(f"alphas must lie in (0, 2], got {alphas}")
        if self.variant == LOG_CORRECTED:
            if len(alphas) != 2 or alphas[0] != alphas[1]:
                raise DomainError("log_corrected needs d=2 with alpha1 == alpha2")
            if self.cutoff_radius < math.e:
                object.__setattr__(self, "cutoff_radius", math.e)
        if self.cutoff_radius < 1.0:
            raise DomainError("cutoff_radius must be >= 1")
        if self.variant == TRUE_EXPONENT:
            if self.coefficients is None:
                raise DomainError("true_exponent requires coefficients")
            coeffs = tuple(float(c) for c in self.coefficients)
            if len(coeffs) != len(alphas) or any(c <= 0 for c in coeffs):
                raise DomainError("coefficients must be positive, one per axis")
            object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "alphas": list(self.alphas),
            "cutoff_radius": float(self.cutoff_radius),
            "coefficients": None if self.coefficients is None else list(self.coefficients),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        coeffs = d.get("coefficients")
        return cls(
            variant=d["variant"],
            alphas=tuple(d["alphas"]),
            cutoff_radius=float(d.get("cutoff_radius", 1.0)),
            coefficients=None if coeffs is None else tuple(coeffs),
        )


def kernel_eval(spec: KernelSpec, x) -> float:
    """Evaluate kappa at a single point; positive for x != 0."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dim,):
        raise DomainError(f"point must have shape ({spec.dim},), got {x.shape}")
    ax = np.abs(x)
    if spec.variant == ANISOTROPIC:
        return float(np.sum(ax ** np.asarray(spec.alphas)))
    if spec.variant == TRUE_EXPONENT:
        return float(
            np.sum(np.asarray(spec.coefficients) * ax ** np.asarray(spec.alphas))
        )
    norm = float(np.hypot(ax[0], ax[1]))
    if norm < math.e:
        raise DomainError(f"log_corrected kernel undefined inside radius e (||x||={norm})")
    a = spec.alphas[0]
    return float(ax[0] ** a + ax[1] ** a * math.log(norm) ** a)


def region_weight(spec: KernelSpec, x1, x2):
    """Vectorized per-factor weight of the shell-region integrals.

    Anisotropic: 1 / (|x1|**a1 + |x2|**a2).  Log-corrected: the exact
    integrand factor (|x1| + |x2| * ln||x||)**(-a); entries inside the e-disk
    are zeroed (the region excludes them).  Shapes broadcast.
    """
    x1 = np.abs(np.asarray(x1, dtype=float))
    x2 = np.abs(np.asarray(x2, dtype=float))
    if spec.variant == ANISOTROPIC:
        a1, a2 = spec.alphas
        return 1.0 / (x1 ** a1 + x2 ** a2)
    if spec.variant == TRUE_EXPONENT:
        a1, a2 = spec.alphas
        c1, c2 = spec.coefficients
        return 1.0 / (c1 * x1 ** a1 + c2 * x2 ** a2)
    a = spec.alphas[0]
    norm = np.hypot(x1, x2)
    ok = norm >= math.e
    base = x1 + x2 * np.log(np.where(ok, norm, math.e))
    with np.errstate(divide="ignore"):
        w = base ** (-a)
    return np.where(ok, w, 0.0)


@dataclass(frozen=True)
class RegionSpec:
    """The planar shell region: ||x_i|| above the cutoff for every copy and the
    coordinate sums pinned to [q-1, q) and [r-1, r) in absolute value.

    ``subregion=(i, j)`` selects one of the sixteen case splits used in the
    induction over copies; ``log_variant`` raises the shell floor to e and
    requires q, r >= 3.
    """

    k: int
    q: float
    r: float
    subregion: tuple | None = None
    log_variant: bool = False

    def __post_init__(self):
        if not (self.k == int(self.k) and self.k >= 1):
            raise DomainError(f"k must be an integer >= 1, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        lo = 3.0 if self.log_variant else 1.0
        if not (self.q >= lo and self.r >= lo):
            raise DomainError(f"q, r must be >= {lo}, got ({self.q}, {self.r})")
        if self.subregion is not None:
            i, j = self.subregion
            if i not in (1, 2, 3, 4) or j not in (1, 2, 3, 4):
                raise DomainError(f"subregion indices must be in 1..4, got {self.subregion}")
            object.__setattr__(self, "subregion", (int(i), int(j)))

    @property
    def cutoff(self) -> float:
        return math.e if self.log_variant else 1.0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "q": float(self.q),
            "r": float(self.r),
            "subregion": None if self.subregion is None else list(self.subregion),
            "log_variant": self.log_variant,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegionSpec":
        sub = d.get("subregion")
        return cls(
            k=int(d["k"]),
            q=float(d["q"]),
            r=float(d["r"]),
            subregion=None if sub is None else tuple(sub),
            log_variant=bool(d.get("log_variant", False)),
        )


def _case_holds(case: int, partial_abs: float, last: float, s: float) -> bool:
    """One coordinate-case constraint of the region split.

    ``partial_abs`` = |sum over the first k-1 copies|, ``last`` = the k-th
    copy's coordinate, ``s`` = the shell parameter (q or r).
    """
    if case == 1:
        return last >= 1 and s + last - 1 <= partial_abs <= s + last
    if case == 2:
        return 1 <= last <= s - 1 and s - last - 1 <= partial_abs <= s - last
    if case == 3:
        return partial_abs <= 2 and s - 1 <= last <= s + 1
    return last >= s + 1 and last - s <= partial_abs <= last - s + 1


def region_membership(region: RegionSpec, xs) -> bool:
    """True iff the k planar points satisfy every constraint of the region."""
    pts = np.asarray(xs, dtype=float)
    if pts.shape != (region.k, 2):
        raise DomainError(f"expected {region.k} planar points, got shape {pts.shape}")
    cut = region.cutoff
    if region.subregion is None:
        if np.any(np.hypot(pts[:, 0], pts[:, 1]) <= cut):
            return False
        s1, s2 = np.sum(pts, axis=0)
        return (region.q - 1 <= abs(s1) < region.q) and (
            region.r - 1 <= abs(s2) < region.r
        )
    # Case split: copies 1..k-1 keep |coordinate| >= 1, the k-th copy sits in
    # the positive quadrant, and each coordinate obeys its case constraint.
    if np.any(np.abs(pts[:-1]) < 1.0) or pts[-1, 0] < 1.0 or pts[-1, 1] < 1.0:
        return False
    i, j = region.subregion
    p1 = abs(float(np.sum(pts[:-1, 0])))
    p2 = abs(float(np.sum(pts[:-1, 1])))
    return _case_holds(i, p1, float(pts[-1, 0]), region.q) and _case_holds(
        j, p2, float(pts[-1, 1]), region.r
    )


def multipoint_integrand(
    spec: KernelSpec, beta: float, xis, first_factor: str = "coordinate_sum"
) -> float:
    """The k-point integrand: a sum-locked first factor times the kernel factors.

    first_factor:
      - "coordinate_sum": 1 / (1 + sum_j |sum_i xi_{ij}|**beta)
      - "norm":           1 / (1 + ||sum_i xi_i||**beta)
    times prod_i 1 / (1 + kappa(xi_i)).  The two first-factor forms are
    comparable; the coordinate-sum form is the one the threshold series use.
    """
    pts = np.asarray(xis, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != spec.dim:
        raise DomainError(f"expected points of dimension {spec.dim}")
    if not (0 < beta <= spec.dim):
        raise DomainError(f"beta must be in (0, d], got {beta}")
    total = np.sum(pts, axis=0)
    if first_factor == "coordinate_sum":
        first = 1.0 / (1.0 + float(np.sum(np.abs(total) ** beta)))
    elif first_factor == "norm":
        first = 1.0 / (1.0 + float(np.linalg.norm(total)) ** beta)
    else:
        raise DomainError(f"unknown first_factor {first_factor!r}")
    prod = 1.0
    for row in pts:
        prod /= 1.0 + kernel_eval(spec, row)
    return first * prod
