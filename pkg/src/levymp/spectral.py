"""Spectral classification of stability exponent matrices.

A d x d matrix B (d <= 3) together with a scale c > 1 determines the scaling
law of an operator semistable process.  The reciprocals of the eigenvalue real
parts of B are the indices alpha_1 >= ... >= alpha_d in (0, 2], and the real
Jordan structure of B decides which closed-form dimension/existence results
apply.  This module extracts both from the raw matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousJordan, DomainError, NonFullSpectrum

DEFAULT_TOL = 1e-8

# Case labels for the classification.
CASE_A1_DIAG = "A1_diag"  # d=2, diagonalizable over R
CASE_A1_ROT = "A1_rot"    # d=2, complex conjugate pair (rotation block)
CASE_A2 = "A2"            # d=2, single 2x2 nilpotent block
CASE_B1 = "B1"            # d=3, diagonalizable (possibly with a rotation block)
CASE_B2 = "B2"            # d=3, one 2x2 nilpotent block
CASE_B3 = "B3"            # d=3, single 3x3 nilpotent block
CASE_D1 = "D1"            # d=1 scalar exponent


@dataclass(frozen=True)
class StabilityExponent:
    """Raw scaling-law input: the matrix B and the semistable scale c > 1.

    The matrix must be finite with every eigenvalue real part in [1/2, oo),
    i.e. every index alpha_j = 1/Re(lambda) in (0, 2].
    """

    matrix: np.ndarray
    scale_c: float

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"matrix must be square, got shape {m.shape}")
        if m.shape[0] not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        if not (np.isfinite(self.scale_c) and self.scale_c > 1.0):
            raise DomainError(f"scale_c must be > 1, got {self.scale_c}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        _indices_from_real_parts(np.linalg.eigvals(m).real, DEFAULT_TOL)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralProfile:
    """Everything the closed-form results consume.

    ``alphas`` are sorted non-increasing; ``real_parts``/``multiplicities``
    describe the distinct eigenvalue real parts in increasing order;
    ``nilpotent_block_sizes`` lists the Jordan blocks of size >= 2 (nonempty
    exactly for the nilpotent cases A2, B2, B3); ``rotation_b`` records the
    off-diagonal rotation rate when a complex conjugate pair is present.
    """

    alphas: tuple
    real_parts: tuple
    multiplicities: tuple
    case_label: str
    rotation_b: float | None = None
    nilpotent_block_sizes: tuple = ()

    def __post_init__(self):
        if len(self.alphas) != int(sum(self.multiplicities)):
            raise DomainError("multiplicities must sum to the dimension")
        if list(self.alphas) != sorted(self.alphas, reverse=True):
            raise DomainError("alphas must be sorted non-increasing")
        nil_cases = {CASE_A2, CASE_B2, CASE_B3}
        if (self.case_label in nil_cases) != bool(self.nilpotent_block_sizes):
            raise DomainError(
                "nilpotent_block_sizes must be nonempty exactly for cases A2/B2/B3"
            )

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def to_dict(self) -> dict:
        return {
            "alphas": [float(a) for a in self.alphas],
            "real_parts": [float(a) for a in self.real_parts],
            "multiplicities": list(self.multiplicities),
            "case_label": self.case_label,
            "rotation_b": None if self.rotation_b is None else float(self.rotation_b),
            "nilpotent_block_sizes": list(self.nilpotent_block_sizes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralProfile":
        return cls(
            alphas=tuple(d["alphas"]),
            real_parts=tuple(d["real_parts"]),
            multiplicities=tuple(int(m) for m in d["multiplicities"]),
            case_label=d["case_label"],
            rotation_b=d.get("rotation_b"),
            nilpotent_block_sizes=tuple(int(s) for s in d.get("nilpotent_block_sizes", ())),
        )


def diagonal_profile(alphas) -> SpectralProfile:
    """Profile of a diagonal exponent diag(1/alpha_1, ..., 1/alpha_d).

    Convenience for callers that supply indices directly instead of a matrix.
    """
    alphas = tuple(sorted((float(a) for a in alphas), reverse=True))
    for a in alphas:
        if not 0.0 < a <= 2.0:
            raise NonFullSpectrum(f"index {a} outside (0, 2]")
    d = len(alphas)
    if d == 1:
        label = CASE_D1
    elif d == 2:
        label = CASE_A1_DIAG
    elif d == 3:
        label = CASE_B1
    else:
        # Synthetic profiles with d >= 4 are allowed as data (existence is
        # answered trivially for them); label them as diagonalizable.
        label = CASE_B1
    reals = sorted({1.0 / a for a in alphas})
    mults = []
    grouped = []
    for r in reals:
        cnt = sum(1 for a in alphas if 1.0 / a == r)
        grouped.append(r)
        mults.append(cnt)
    return SpectralProfile(
        alphas=alphas,
        real_parts=tuple(grouped),
        multiplicities=tuple(mults),
        case_label=label,
    )


def _indices_from_real_parts(real_parts, tol):
    """Map eigenvalue real parts to indices 1/a, rejecting values outside (0, 2]."""
    alphas = []
    for a in real_parts:
        if a <= tol:
            raise NonFullSpectrum(f"eigenvalue real part {a} is not positive")
        alpha = 1.0 / a
        if alpha > 2.0 + tol:
            raise NonFullSpectrum(f"index {alpha} exceeds 2 beyond tolerance")
        alphas.append(min(alpha, 2.0))
    return alphas


def _cluster(values, tol):
    """Group sorted scalars whose gaps are below tol*(1+|v|); returns index groups."""
    order = np.argsort(values)
    groups = []
    current = [order[0]]
    for idx in order[1:]:
        ref = values[current[-1]]
        if abs(values[idx] - ref) < tol * (1.0 + abs(ref)):
            current.append(idx)
        else:
            groups.append(current)
            current = [idx]
    groups.append(current)
    return groups


def classify_exponent(exp: StabilityExponent, tol: float = DEFAULT_TOL) -> SpectralProfile:
    """Classify a stability exponent into its spectral case and extract indices.

    Two eigenvalues are treated as equal when they differ by less than
    tol*(1+|lambda|); Jordan structure of a repeated real eigenvalue is decided
    by the numerical rank of B - lambda*I with singular-value cutoff
    tol*sigma_max.  Raises AmbiguousJordan when that rank test is unstable at
    the requested tolerance (a singular value within a factor 10 of the cutoff,
    or a rank inconsistent with the eigenvalue clustering).

    Note: matrices formed numerically as P D P^{-1} perturb a defective
    eigenvalue of multiplicity m by roughly eps_machine**(1/m); pass a
    tolerance above that scale to recover the intended structure.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    mat = np.asarray(exp.matrix, dtype=float)
    d = mat.shape[0]
    eigs = np.linalg.eigvals(mat)

    # Imaginary parts below the clustering tolerance are roundoff, not rotation.
    im = np.where(np.abs(eigs.imag) < tol * (1.0 + np.abs(eigs)), 0.0, eigs.imag)
    eigs = eigs.real + 1j * im
    rotation_b = float(np.max(np.abs(im))) if np.any(im != 0.0) else None

    # Cluster equal eigenvalues (complex pairs stay distinct from each other).
    keys = eigs.real + 1000.0 * np.abs(eigs.imag)  # separates conjugates cheaply
    eq_groups = _cluster(keys, tol)

    nilpotent_blocks: list[int] = []
    for group in eq_groups:
        m = len(group)
        lam = eigs[group[0]]
        if m < 2 or lam.imag != 0.0:
            continue  # simple eigenvalue, or rotation pair (diagonalizable over C)
        lam_bar = float(np.mean(eigs[group].real))
        sv = np.linalg.svd(mat - lam_bar * np.eye(d), compute_uv=False)
        smax = sv[0]
        if smax == 0.0:
            continue  # B is exactly lam*I
        cutoff = tol * smax
        straddle = (sv > cutoff / 10.0) & (sv < cutoff * 10.0)
        if np.any(straddle):
            raise AmbiguousJordan(
                f"singular values {sv} straddle cutoff {cutoff:g} within 10x"
            )
        rank = int(np.sum(sv > cutoff))
        geom = d - rank
        if geom == 0:
            raise AmbiguousJordan(
                "rank test found no null direction for a clustered eigenvalue; "
                "eigenvalue clustering and rank test disagree at this tolerance"
            )
        if geom < m:
            # geom = number of Jordan blocks; only sizes >= 2 carry nilpotence.
            if geom == 1:
                nilpotent_blocks.append(m)
            else:  # m = 3, geom = 2 -> blocks {2, 1}
                nilpotent_blocks.append(2)

    # Real-part clusters give the index multiplicities.
    rp_groups = _cluster(eigs.real, tol)
    real_parts = []
    mults = []
    for group in sorted(rp_groups, key=lambda g: float(np.mean(eigs.real[g]))):
        real_parts.append(float(np.mean(eigs.real[group])))
        mults.append(len(group))
    alphas_per_cluster = _indices_from_real_parts(real_parts, tol)
    alphas = []
    for a, mult in zip(alphas_per_cluster, mults):
        alphas.extend([a] * mult)
    alphas.sort(reverse=True)

    if d == 1:
        label = CASE_D1
    elif d == 2:
        if rotation_b is not None:
            label = CASE_A1_ROT
        elif nilpotent_blocks:
            label = CASE_A2
        else:
            label = CASE_A1_DIAG
    else:
        if 3 in nilpotent_blocks:
            label = CASE_B3
        elif nilpotent_blocks:
            label = CASE_B2
        else:
            label = CASE_B1

    return SpectralProfile(
        alphas=tuple(alphas),
        real_parts=tuple(real_parts),
        multiplicities=tuple(mults),
        case_label=label,
        rotation_b=rotation_b,
        nilpotent_block_sizes=tuple(sorted(nilpotent_blocks, reverse=True)),
    )


# [6/6] Pade coefficients of exp(x).
_PADE6 = (1.0, 1 / 2, 5 / 44, 1 / 66, 1 / 792, 1 / 15840, 1 / 665280)


def expm_pade6(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a fixed [6/6] Pade core.

    The argument is scaled so its 1-norm is at most 1/2 before the Pade step,
    which keeps the approximation error far below double-precision roundoff
    for the small dense matrices used here.
    """
    a = np.asarray(a, dtype=float)
    norm = np.linalg.norm(a, 1)
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    x = a / (2.0 ** s)
    eye = np.eye(a.shape[0])
    x2 = x @ x
    x4 = x2 @ x2
    x6 = x2 @ x4
    c = _PADE6
    even = c[0] * eye + c[2] * x2 + c[4] * x4 + c[6] * x6
    odd = x @ (c[1] * eye + c[3] * x2 + c[5] * x4)
    f = np.linalg.solve(even - odd, even + odd)
    for _ in range(s):
        f = f @ f
    return f


def matrix_power_cB(exp: StabilityExponent, t: float) -> np.ndarray:
    """t**B = exp(ln(t) * B) for t > 0; satisfies (s*t)**B = s**B @ t**B."""
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive, got {t}")
    return expm_pade6(math.log(t) * np.asarray(exp.matrix, dtype=float))
