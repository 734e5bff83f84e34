"""Closed-form dimension and existence results for k-multiple points.

All formulas are exact functions of the indices (alpha_1, ..., alpha_d) and k.
Inputs may be floats or `fractions.Fraction`; with Fractions every comparison,
including the discontinuous boundary cases, is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DomainError, UnsupportedCase
from .spectral import (
    CASE_A1_DIAG,
    CASE_A1_ROT,
    CASE_A2,
    CASE_B1,
    CASE_B2,
    CASE_B3,
    CASE_D1,
    SpectralProfile,
)

BOUNDARY_ATOL = 1e-12


@dataclass(frozen=True)
class DimensionReport:
    """Outcome of the dimension/existence dispatch for one (profile, k) pair.

    ``dim_value`` keeps the raw formula value (negative means the set is empty
    almost surely) and is None in d=3 where only existence is reported.
    ``boundary_case`` marks the nilpotent-case parameters where the set is
    nonempty yet has dimension zero.
    """

    k: int
    dim_value: float | None
    dim_clamped: float | None
    exists: bool
    boundary_case: bool
    formula_terms: tuple | None
    source: str

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "dim_value": None if self.dim_value is None else float(self.dim_value),
            "dim_clamped": None if self.dim_clamped is None else float(self.dim_clamped),
            "exists": self.exists,
            "boundary_case": self.boundary_case,
            "formula_terms": None
            if self.formula_terms is None
            else [float(t) for t in self.formula_terms],
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DimensionReport":
        ft = d.get("formula_terms")
        return cls(
            k=int(d["k"]),
            dim_value=d.get("dim_value"),
            dim_clamped=d.get("dim_clamped"),
            exists=bool(d["exists"]),
            boundary_case=bool(d["boundary_case"]),
            formula_terms=None if ft is None else tuple(ft),
            source=d["source"],
        )


def _check_pair(alpha1, alpha2, k):
    if not (k == int(k) and k >= 2):
        raise DomainError(f"k must be an integer >= 2, got {k}")
    if not (2 >= alpha1 >= alpha2 > 0):
        raise DomainError(
            f"need 2 >= alpha1 >= alpha2 > 0, got ({alpha1}, {alpha2})"
        )


def _min_terms(alpha1, alpha2, k):
    """The two affine expressions whose min is the planar dimension."""
    isum = 1 / alpha1 + 1 / alpha2
    t1 = alpha1 * (k - (k - 1) * isum)
    t2 = 2 - k * alpha2 * (isum - 1)
    return t1, t2


def hausdorff_dim_R2(alpha1, alpha2, k: int):
    """Planar k-multiple point dimension; a negative value means the set is empty.

    Evaluates min{alpha1*(k-(k-1)*(1/alpha1+1/alpha2)),
    2 - k*alpha2*(1/alpha1+1/alpha2-1)} exactly in the input arithmetic.
    """
    _check_pair(alpha1, alpha2, k)
    t1, t2 = _min_terms(alpha1, alpha2, k)
    return min(t1, t2)


def beta_threshold_R2(alpha1, alpha2, k: int):
    """Critical series exponent dual to the planar dimension formula.

    Returns max{2 - alpha1*(k-(k-1)*(1/alpha1+1/alpha2)),
    k*alpha2*(1/alpha1+1/alpha2-1)}; clamped to [0, 2] it equals
    2 - clamp(hausdorff_dim_R2).
    """
    _check_pair(alpha1, alpha2, k)
    isum = 1 / alpha1 + 1 / alpha2
    u1 = 2 - alpha1 * (k - (k - 1) * isum)
    u2 = k * alpha2 * (isum - 1)
    return max(u1, u2)


def _exact(x) -> bool:
    return isinstance(x, Rational)


def _ge_with_boundary(lhs, rhs):
    """(lhs >= rhs, lhs == rhs) with exact comparison for rational inputs and a
    1e-12 absolute window otherwise."""
    if _exact(lhs) and _exact(rhs):
        return lhs >= rhs, lhs == rhs
    lhs = float(lhs)
    rhs = float(rhs)
    if abs(lhs - rhs) < BOUNDARY_ATOL:
        return True, True
    return lhs > rhs, False


def exists_multiple(profile: SpectralProfile, k: int) -> DimensionReport:
    """Existence (and planar dimension) of k-multiple points for a classified exponent.

    Dispatch:
      d=2, k=2:            exists iff 2 - 1/a1 - 1/a2 > 0 (any planar case);
      d=2, k>=3, A1:       exists iff k - (k-1)*(1/a1 + 1/a2) > 0;
      d=2, k>=3, A2:       exists iff a >= 2(k-1)/k, boundary when equal;
      d=3, k=2, B1/B2:     exists iff 2 - 1/a1 - 1/a2 - 1/a3 > 0;
      d=3, k=2, B3:        exists iff a >= 3/2, boundary when equal;
      d=3, k>=3 and d>=4:  never.

    d=1 has no closed form here; use the numerical estimator instead.
    """
    if not (k == int(k) and k >= 2):
        raise DomainError(f"k must be an integer >= 2, got {k}")
    k = int(k)
    d = profile.dim
    alphas = profile.alphas
    case = profile.case_label

    if case == CASE_D1 or d == 1:
        raise UnsupportedCase(
            "no closed form for d=1; route through the numerical estimator"
        )

    if d >= 4:
        return DimensionReport(
            k=k, dim_value=None, dim_clamped=None, exists=False,
            boundary_case=False, formula_terms=None, source="high_dimension_empty",
        )

    if d == 3:
        if k >= 3:
            return DimensionReport(
                k=k, dim_value=None, dim_clamped=None, exists=False,
                boundary_case=False, formula_terms=None, source="r3_triple_empty",
            )
        if case == CASE_B3:
            alpha = alphas[0]
            exists, on_boundary = _ge_with_boundary(alpha, Fraction(3, 2))
            return DimensionReport(
                k=k, dim_value=None, dim_clamped=None, exists=exists,
                boundary_case=exists and on_boundary, formula_terms=None,
                source="r3_nilpotent_double_threshold",
            )
        gap = 2 - sum(1 / a for a in alphas)
        return DimensionReport(
            k=k, dim_value=None, dim_clamped=None, exists=gap > 0,
            boundary_case=False, formula_terms=None,
            source="r3_double_sum_rule",
        )

    # d == 2 from here on.
    alpha1, alpha2 = alphas
    t1, t2 = _min_terms(alpha1, alpha2, k)
    dim_value = min(t1, t2)
    boundary = False

    if k == 2:
        exists = (2 - 1 / alpha1 - 1 / alpha2) > 0
        source = "planar_double_sum_rule"
    elif case == CASE_A2:
        exists, boundary = _ge_with_boundary(alpha1, Fraction(2 * (k - 1), k))
        boundary = exists and boundary
        source = "planar_nilpotent_threshold"
    elif case in (CASE_A1_DIAG, CASE_A1_ROT):
        exists = (k - (k - 1) * (1 / alpha1 + 1 / alpha2)) > 0
        source = "planar_dimension_positivity"
    else:
        raise UnsupportedCase(f"unrecognized planar case {case!r}")

    dim_clamped = max(dim_value, 0 * dim_value) if exists else 0 * dim_value
    if boundary:
        # Nonempty with dimension exactly zero.
        dim_clamped = 0 * dim_value
    return DimensionReport(
        k=k,
        dim_value=dim_value,
        dim_clamped=dim_clamped,
        exists=exists,
        boundary_case=boundary,
        formula_terms=(t1, t2),
        source=source,
    )
