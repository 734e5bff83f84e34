import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from levymp.errors import AmbiguousJordan, DomainError, NonFullSpectrum
from levymp.spectral import (
    SpectralProfile,
    StabilityExponent,
    classify_exponent,
    diagonal_profile,
    expm_pade6,
    matrix_power_cB,
)

# The six template exponent matrices of the planar/spatial classification.
TEMPLATES = {
    "A1_diag": np.diag([1 / 1.8, 1 / 1.5]),
    "A1_rot": np.array([[0.6, -1.0], [1.0, 0.6]]),
    "A2": np.array([[0.75, 0.0], [1.0, 0.75]]),
    "B1": np.diag([1 / 1.9, 1 / 1.4, 1 / 1.1]),
    "B2": np.array([[0.7, 0.0, 0.0], [1.0, 0.7, 0.0], [0.0, 0.0, 0.55]]),
    "B3": np.array([[2 / 3, 0.0, 0.0], [1.0, 2 / 3, 0.0], [0.0, 1.0, 2 / 3]]),
}


def classify_matrix(m, tol=1e-8, c=2.0):
    return classify_exponent(StabilityExponent(matrix=np.asarray(m, float), scale_c=c), tol)


class TestClassification:
    def test_diagonal(self):
        p = classify_matrix(np.diag([1 / 1.8, 1 / 1.5]))
        assert p.case_label == "A1_diag"
        assert p.alphas == pytest.approx((1.8, 1.5))
        assert p.nilpotent_block_sizes == ()
        assert p.rotation_b is None

    def test_planar_jordan_block(self):
        p = classify_matrix([[0.75, 0.0], [1.0, 0.75]])
        assert p.case_label == "A2"
        assert p.alphas == pytest.approx((4 / 3, 4 / 3))
        assert p.nilpotent_block_sizes == (2,)

    def test_rotation(self):
        # eigenvalues 0.6 +- 1i by the characteristic polynomial
        p = classify_matrix([[0.6, -1.0], [1.0, 0.6]])
        assert p.case_label == "A1_rot"
        assert p.alphas == pytest.approx((5 / 3, 5 / 3))
        assert p.rotation_b == pytest.approx(1.0)

    def test_full_jordan_3x3(self):
        p = classify_matrix([[2 / 3, 0, 0], [1, 2 / 3, 0], [0, 1, 2 / 3]])
        assert p.case_label == "B3"
        assert p.alphas == pytest.approx((1.5, 1.5, 1.5))
        assert p.nilpotent_block_sizes == (3,)

    def test_b2_block_plus_scalar(self):
        p = classify_matrix(TEMPLATES["B2"])
        assert p.case_label == "B2"
        assert p.nilpotent_block_sizes == (2,)
        assert p.alphas == pytest.approx((1 / 0.55, 1 / 0.7, 1 / 0.7))

    def test_d1(self):
        p = classify_matrix([[0.8]])
        assert p.case_label == "D1"
        assert p.alphas == pytest.approx((1.25,))

    def test_d3_rotation_stays_b1(self):
        m = np.array([[0.6, -0.7, 0.0], [0.7, 0.6, 0.0], [0.0, 0.0, 0.9]])
        p = classify_matrix(m)
        assert p.case_label == "B1"
        assert p.rotation_b == pytest.approx(0.7)

    def test_rejects_index_out_of_range(self):
        with pytest.raises(NonFullSpectrum):
            StabilityExponent(matrix=np.diag([0.4, 0.8]), scale_c=2.0)  # alpha = 2.5
        with pytest.raises(NonFullSpectrum):
            StabilityExponent(matrix=np.diag([-0.5, 0.8]), scale_c=2.0)

    def test_rejects_bad_scale(self):
        with pytest.raises(DomainError):
            StabilityExponent(matrix=np.eye(2), scale_c=1.0)

    def test_ambiguous_jordan(self):
        # Eigenvalues split right at the clustering tolerance: the rank test
        # cannot separate a defective block from a near-degenerate pair.
        m = np.array([[0.75, 0.0], [0.0, 0.75 + 1.2e-8]])
        with pytest.raises(AmbiguousJordan):
            classify_matrix(m, tol=1e-8)

    def test_block_order_shuffle_keeps_alphas(self):
        m1 = np.diag([1 / 1.9, 1 / 1.4, 1 / 1.1])
        m2 = np.diag([1 / 1.1, 1 / 1.9, 1 / 1.4])
        assert classify_matrix(m1).alphas == classify_matrix(m2).alphas

    @pytest.mark.parametrize("label", sorted(TEMPLATES))
    def test_similarity_invariance(self, label):
        # Defective eigenvalues of P D P^-1 perturb like eps**(1/m) in floats,
        # so the classification tolerance must sit above that scale.
        rng = np.random.default_rng(1234)
        template = TEMPLATES[label]
        d = template.shape[0]
        base = classify_matrix(template, tol=1e-4)
        for _ in range(5):
            q1, _ = np.linalg.qr(rng.normal(size=(d, d)))
            q2, _ = np.linalg.qr(rng.normal(size=(d, d)))
            sv = np.linspace(1.0, 6.0, d)  # condition number 6 < 10
            p = q1 @ np.diag(sv) @ q2
            m = p @ template @ np.linalg.inv(p)
            prof = classify_matrix(m, tol=1e-4)
            assert prof.case_label == base.case_label
            assert np.allclose(prof.alphas, base.alphas, atol=1e-6)


class TestProfileInvariants:
    def test_multiplicities_must_sum(self):
        with pytest.raises(DomainError):
            SpectralProfile(
                alphas=(1.5, 1.5), real_parts=(2 / 3,), multiplicities=(1,),
                case_label="A1_diag",
            )

    def test_nilpotent_blocks_match_case(self):
        with pytest.raises(DomainError):
            SpectralProfile(
                alphas=(1.5, 1.5), real_parts=(2 / 3,), multiplicities=(2,),
                case_label="A2",
            )

    def test_diagonal_profile_sorted(self):
        p = diagonal_profile([1.2, 1.8])
        assert p.alphas == (1.8, 1.2)
        assert p.case_label == "A1_diag"

    def test_roundtrip(self):
        p = classify_matrix(TEMPLATES["A2"])
        assert SpectralProfile.from_dict(p.to_dict()) == p


class TestMatrixPower:
    def test_diagonal(self):
        e = StabilityExponent(matrix=np.diag([0.5, 0.5]), scale_c=2.0)
        assert np.allclose(matrix_power_cB(e, 4.0), np.diag([2.0, 2.0]))

    def test_identity_at_t1(self):
        e = StabilityExponent(matrix=TEMPLATES["A2"], scale_c=2.0)
        assert np.allclose(matrix_power_cB(e, 1.0), np.eye(2))

    def test_jordan_block_hand_value(self):
        # exp of [[a,0],[1,a]] * 1 = e^a * [[1,0],[1,1]] since N^2 = 0
        e = StabilityExponent(matrix=[[0.75, 0.0], [1.0, 0.75]], scale_c=2.0)
        got = matrix_power_cB(e, math.e)
        want = math.exp(0.75) * np.array([[1.0, 0.0], [1.0, 1.0]])
        assert np.allclose(got, want, rtol=1e-12)

    def test_rejects_nonpositive_t(self):
        e = StabilityExponent(matrix=np.eye(2) * 0.6, scale_c=2.0)
        with pytest.raises(DomainError):
            matrix_power_cB(e, 0.0)

    @pytest.mark.parametrize("label", sorted(TEMPLATES))
    def test_semigroup_identity(self, label):
        e = StabilityExponent(matrix=TEMPLATES[label], scale_c=2.0)
        rng = np.random.default_rng(7)
        for _ in range(20):
            s, t = rng.uniform(0.1, 10.0, size=2)
            lhs = matrix_power_cB(e, s * t)
            rhs = matrix_power_cB(e, s) @ matrix_power_cB(e, t)
            err = np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs)
            assert err < 1e-10

    @given(
        st.lists(st.floats(-1.0, 1.0), min_size=9, max_size=9),
        st.floats(0.02, 4.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_expm_matches_scipy(self, entries, scale):
        a = scale * np.array(entries).reshape(3, 3)
        got = expm_pade6(a)
        want = scipy.linalg.expm(a)
        assert np.allclose(got, want, rtol=1e-11, atol=1e-12)
