import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levymp.errors import DomainError
from levymp.kernels import (
    KernelSpec,
    RegionSpec,
    kernel_eval,
    multipoint_integrand,
    region_membership,
    region_weight,
)

ANISO = KernelSpec(variant="anisotropic", alphas=(1.8, 1.5))


class TestKernelEval:
    def test_single_coordinate(self):
        assert kernel_eval(ANISO, (1.0, 0.0)) == pytest.approx(1.0)

    def test_euclidean_special_case(self):
        spec = KernelSpec(variant="anisotropic", alphas=(2.0, 2.0))
        assert kernel_eval(spec, (3.0, 4.0)) == pytest.approx(25.0)

    def test_log_variant_hand_value(self):
        spec = KernelSpec(variant="log_corrected", alphas=(1.5, 1.5))
        assert kernel_eval(spec, (0.0, math.e)) == pytest.approx(math.e ** 1.5)

    def test_log_variant_inside_radius(self):
        spec = KernelSpec(variant="log_corrected", alphas=(1.5, 1.5))
        with pytest.raises(DomainError):
            kernel_eval(spec, (1.0, 1.0))

    def test_log_variant_needs_equal_alphas(self):
        with pytest.raises(DomainError):
            KernelSpec(variant="log_corrected", alphas=(1.5, 1.4))

    def test_true_exponent_needs_coefficients(self):
        with pytest.raises(DomainError):
            KernelSpec(variant="true_exponent", alphas=(1.5, 1.5))
        spec = KernelSpec(
            variant="true_exponent", alphas=(1.5, 1.5), coefficients=(0.5, 2.0)
        )
        assert kernel_eval(spec, (1.0, 1.0)) == pytest.approx(2.5)

    @given(st.floats(-50, 50), st.floats(-50, 50))
    @settings(max_examples=100, deadline=None)
    def test_evenness(self, x, y):
        spec = KernelSpec(variant="anisotropic", alphas=(1.8, 1.2))
        v = kernel_eval(spec, (x, y))
        assert kernel_eval(spec, (-x, -y)) == v
        assert kernel_eval(spec, (-x, y)) == v
        assert kernel_eval(spec, (x, -y)) == v

    @given(st.floats(0.01, 100.0), st.floats(-20, 20), st.floats(-20, 20))
    @settings(max_examples=100, deadline=None)
    def test_quasi_homogeneity(self, lam, x, y):
        a1, a2 = 1.8, 1.2
        spec = KernelSpec(variant="anisotropic", alphas=(a1, a2))
        base = kernel_eval(spec, (x, y))
        scaled = kernel_eval(spec, (lam ** (1 / a1) * x, lam ** (1 / a2) * y))
        assert scaled == pytest.approx(lam * base, rel=1e-12, abs=1e-300)

    def test_true_vs_aniso_sandwich(self):
        # ratio pinned between min and max coefficient everywhere
        rng = np.random.default_rng(0)
        coeffs = (0.5, 2.0)
        true = KernelSpec(variant="true_exponent", alphas=(1.7, 1.3), coefficients=coeffs)
        aniso = KernelSpec(variant="anisotropic", alphas=(1.7, 1.3))
        for _ in range(200):
            x = rng.uniform(-30, 30, 2)
            if np.hypot(*x) < 1:
                continue
            ratio = kernel_eval(true, x) / kernel_eval(aniso, x)
            assert min(coeffs) - 1e-12 <= ratio <= max(coeffs) + 1e-12

    def test_region_weight_matches_reciprocal(self):
        spec = KernelSpec(variant="anisotropic", alphas=(1.8, 1.2))
        assert region_weight(spec, 2.0, 3.0) == pytest.approx(
            1.0 / kernel_eval(spec, (2.0, 3.0))
        )

    def test_region_weight_log_uses_sum_form(self):
        # the log-variant region factor is (|x1| + |x2| ln||x||)^-a, not 1/kappa
        spec = KernelSpec(variant="log_corrected", alphas=(1.6, 1.6))
        x = (2.0, 3.0)
        norm = math.hypot(*x)
        want = (2.0 + 3.0 * math.log(norm)) ** -1.6
        assert region_weight(spec, *x) == pytest.approx(want)
        assert region_weight(spec, 0.5, 0.5) == 0.0  # inside radius e


class TestRegionMembership:
    def test_k1_simple(self):
        region = RegionSpec(k=1, q=2.0, r=2.0)
        assert region_membership(region, [(1.5, 1.5)])
        assert not region_membership(region, [(2.5, 1.5)])
        assert not region_membership(region, [(0.5, 0.5)])

    def test_k2_hand_cases(self):
        region = RegionSpec(k=2, q=3.0, r=3.0)
        assert region_membership(region, [(5.0, 5.0), (-2.5, -2.5)])
        assert not region_membership(region, [(5.0, 5.0), (-1.0, -1.0)])

    def test_norm_floor_not_coordinate_floor(self):
        # membership needs ||x|| > 1, individual coordinates may be small
        region = RegionSpec(k=2, q=3.0, r=3.0)
        assert region_membership(region, [(0.2, 2.0), (2.3, 0.5)])

    def test_log_variant_floor(self):
        log_region = RegionSpec(k=2, q=3.0, r=3.0, log_variant=True)
        std_region = RegionSpec(k=2, q=3.0, r=3.0)
        pts = [(1.8, 1.9), (1.0, 0.9)]  # first copy norm 2.62: above 1, below e
        assert region_membership(std_region, pts)
        assert not region_membership(log_region, pts)
        assert region_membership(log_region, [(2.8, 2.9), (0.0, -0.1)]) is False
        assert region_membership(log_region, [(5.8, 5.9), (-3.0, -3.1)])

    def test_log_variant_requires_q_r_three(self):
        with pytest.raises(DomainError):
            RegionSpec(k=1, q=2.0, r=4.0, log_variant=True)

    def test_subregion_cases(self):
        # case 1 in both coordinates: partial sums exceed the shell by the
        # last copy's own coordinates
        region = RegionSpec(k=2, q=3.0, r=3.0, subregion=(1, 1))
        assert region_membership(region, [(-4.5, -4.6), (2.0, 2.0)])
        assert not region_membership(region, [(4.5, 4.6), (2.0, -2.0)])  # last copy not positive
        # case 3: small partial sums, last copy near the shell
        region33 = RegionSpec(k=2, q=5.0, r=5.0, subregion=(3, 3))
        assert region_membership(region33, [(1.5, -1.5), (5.5, 4.5)])
        assert not region_membership(region33, [(3.5, -1.5), (5.5, 4.5)])

    def test_subregion_union_covers_region(self):
        # every region point with positive last copy lies in some case pair
        rng = np.random.default_rng(42)
        region = RegionSpec(k=3, q=6.0, r=5.0)
        hits = 0
        for _ in range(8000):
            pts = rng.uniform(-9, 9, size=(3, 2))
            pts[2] = np.abs(pts[2])
            if not region_membership(region, pts):
                continue
            if np.any(np.abs(pts[:2]) < 1.0) or pts[2, 0] < 1.0 or pts[2, 1] < 1.0:
                continue  # the split additionally restricts the first copies
            hits += 1
            assert any(
                region_membership(
                    RegionSpec(k=3, q=6.0, r=5.0, subregion=(i, j)), pts
                )
                for i in (1, 2, 3, 4)
                for j in (1, 2, 3, 4)
            )
        assert hits > 10

    def test_invalid_specs(self):
        with pytest.raises(DomainError):
            RegionSpec(k=0, q=2.0, r=2.0)
        with pytest.raises(DomainError):
            RegionSpec(k=2, q=0.5, r=2.0)
        with pytest.raises(DomainError):
            RegionSpec(k=2, q=3.0, r=3.0, subregion=(0, 5))


class TestMultipointIntegrand:
    def test_origin_is_one(self):
        spec = KernelSpec(variant="anisotropic", alphas=(2.0, 2.0))
        assert multipoint_integrand(spec, 2.0, [(0.0, 0.0)]) == pytest.approx(1.0)

    def test_cancelling_pair(self):
        spec = KernelSpec(variant="anisotropic", alphas=(1.0, 1.0))
        v = multipoint_integrand(spec, 1.0, [(1.0, 0.0), (-1.0, 0.0)])
        assert v == pytest.approx(0.25)

    def test_single_point_both_forms(self):
        # coordinate-sum first factor: 1/(1+1+1) * 1/(1+2) = 1/9
        spec = KernelSpec(variant="anisotropic", alphas=(1.8, 1.5))
        v = multipoint_integrand(spec, 1.0, [(1.0, 1.0)])
        assert v == pytest.approx(1.0 / 9.0)
        # norm form: 1/(1+sqrt(2)) * 1/3
        v2 = multipoint_integrand(spec, 1.0, [(1.0, 1.0)], first_factor="norm")
        assert v2 == pytest.approx(1.0 / (1.0 + math.sqrt(2.0)) / 3.0)

    def test_beta_domain(self):
        spec = KernelSpec(variant="anisotropic", alphas=(1.8, 1.5))
        with pytest.raises(DomainError):
            multipoint_integrand(spec, 0.0, [(1.0, 1.0)])
        with pytest.raises(DomainError):
            multipoint_integrand(spec, 2.5, [(1.0, 1.0)])

    def test_sign_flip_symmetry_of_kernel_factors(self):
        # the restricted integrand's kernel part is even in every coordinate
        spec = KernelSpec(variant="anisotropic", alphas=(1.8, 1.2))
        rng = np.random.default_rng(3)
        for _ in range(50):
            pts = rng.uniform(1.0, 5.0, size=(3, 2))
            base = np.prod([region_weight(spec, x, y) for x, y in pts])
            for i in range(3):
                for j in range(2):
                    flipped = pts.copy()
                    flipped[i, j] *= -1.0
                    got = np.prod([region_weight(spec, x, y) for x, y in flipped])
                    assert got == pytest.approx(base, rel=1e-14)
