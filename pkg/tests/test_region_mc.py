import math
import os

import numpy as np
import pytest

from levymp.errors import DomainError, ProposalMismatch
from levymp.estimator import mc_region_integral
from levymp.estimator import quadrature as quad
from levymp.estimator.region import IntegralEstimate
from levymp.kernels import KernelSpec, RegionSpec, region_weight

from oracles import adaptive_band_integral, riemann_region_integral_k2

ANISO = KernelSpec(variant="anisotropic", alphas=(1.8, 1.2))


class TestClippedQuadrature:
    """The band quadrature against exact-boundary adaptive integration."""

    @pytest.mark.parametrize(
        "ax,ay,cut",
        [
            (0.3, 0.2, 1.0),      # crossing near the origin
            (-1.2, 0.4, 1.0),     # crossing from the left
            (-0.5, -0.4, 1.0),    # rectangle inside the disk
            (5.0, -0.3, 1.0),     # axis-straddling, outside
            (-0.4, 7.0, 1.0),     # axis-straddling, outside
            (-0.5, 0.8, 1.0),     # axis-straddling and crossing
            (2.0, 3.0, 1.0),      # smooth far rectangle
            (1.5, 1.2, math.e),   # crossing the e-circle
        ],
    )
    def test_clipped_rect_vs_quad(self, ax, ay, cut):
        from scipy import integrate

        w = lambda x, y: region_weight(ANISO, x, y)

        def inner(x):
            ylo, yhi = ay, ay + 1.0
            segments = []
            if abs(x) < cut:
                yc = math.sqrt(cut * cut - x * x)
                if -yc > ylo:
                    segments.append((ylo, min(-yc, yhi)))
                if yc < yhi:
                    segments.append((max(yc, ylo), yhi))
            else:
                segments.append((ylo, yhi))
            tot = 0.0
            for lo, hi in segments:
                if hi <= lo:
                    continue
                pts = [p for p in (0.0,) if lo < p < hi]
                v, _ = integrate.quad(
                    lambda y: float(w(np.asarray(x), np.asarray(y))),
                    lo, hi, epsabs=1e-13, epsrel=1e-12, points=pts or None,
                )
                tot += v
            return tot

        pts = [p for p in (-cut, cut, 0.0) if ax < p < ax + 1.0]
        want, _ = integrate.quad(
            inner, ax, ax + 1.0, epsabs=1e-12, epsrel=1e-11, points=pts or None, limit=300
        )
        got = quad.clipped_rect_integral(lambda x, y: region_weight(ANISO, x, y), ax, ay, cut)
        assert got == pytest.approx(want, rel=5e-8, abs=1e-12)

    def test_band_rectangles_positions(self):
        rects = quad.band_rectangles(10.0, 7.0, s1=2.0, s2=-1.0)
        assert (7.0, 7.0) in rects          # q-1-s1, r-1-s2
        assert (-12.0, -6.0) in rects       # -q-s1, -r-s2


class TestDeterministicK1:
    def test_k1_matches_adaptive_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(8):
            a1 = rng.uniform(1.1, 2.0)
            a2 = rng.uniform(0.8, a1)
            q, r = rng.uniform(3.0, 120.0, size=2)
            kernel = KernelSpec(variant="anisotropic", alphas=(a1, a2))
            est = mc_region_integral(kernel, RegionSpec(k=1, q=q, r=r), 1, seed=0)
            want = adaptive_band_integral("anisotropic", (a1, a2), q, r, 1.0)
            assert est.std_error == 0.0
            assert est.value == pytest.approx(want, rel=1e-8)

    def test_k1_log_matches_adaptive_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            a = rng.uniform(1.1, 1.9)
            q, r = rng.uniform(3.0, 150.0, size=2)
            kernel = KernelSpec(variant="log_corrected", alphas=(a, a))
            region = RegionSpec(k=1, q=q, r=r, log_variant=True)
            est = mc_region_integral(kernel, region, 1, seed=0)
            want = adaptive_band_integral("log_corrected", (a, a), q, r, math.e)
            assert est.value == pytest.approx(want, rel=1e-8)


class TestMonteCarlo:
    def test_reproducible_across_threads(self):
        region = RegionSpec(k=2, q=15.0, r=15.0)
        a = mc_region_integral(ANISO, region, 60_000, seed=11, max_threads=1)
        b = mc_region_integral(ANISO, region, 60_000, seed=11, max_threads=5)
        assert a.value == b.value and a.std_error == b.std_error

    def test_env_var_thread_cap(self, monkeypatch):
        region = RegionSpec(k=2, q=15.0, r=15.0)
        monkeypatch.setenv("LEVY_MP_THREADS", "2")
        a = mc_region_integral(ANISO, region, 40_000, seed=3)
        monkeypatch.setenv("LEVY_MP_THREADS", "7")
        b = mc_region_integral(ANISO, region, 40_000, seed=3)
        assert a.value == b.value

    def test_k2_matches_riemann_oracle(self):
        est = mc_region_integral(ANISO, RegionSpec(k=2, q=20.0, r=20.0), 300_000, seed=5)
        want, err = riemann_region_integral_k2(1.8, 1.2, 20.0, 20.0)
        combined = math.hypot(3.0 * est.std_error, 3.0 * err)
        assert abs(est.value - want) < combined

    def test_std_error_scaling(self):
        # doubling n shrinks the recorded error like sqrt(2), within noise
        region = RegionSpec(k=2, q=12.0, r=12.0)
        ratios = []
        for seed in range(30):
            a = mc_region_integral(ANISO, region, 8_192, seed=seed)
            b = mc_region_integral(ANISO, region, 16_384, seed=1000 + seed)
            ratios.append(a.std_error / b.std_error)
        mean_ratio = float(np.mean(ratios))
        assert 1.2 <= mean_ratio <= 1.7

    def test_value_nonnegative_and_fields(self):
        est = mc_region_integral(ANISO, RegionSpec(k=2, q=9.0, r=9.0), 20_000, seed=1)
        assert est.value >= 0
        assert est.n_samples == 20_000
        assert est.region.q == 9.0
        assert IntegralEstimate.from_dict(est.to_dict()).value == est.value

    def test_kernel_region_compat(self):
        with pytest.raises(DomainError):
            mc_region_integral(ANISO, RegionSpec(k=1, q=5.0, r=5.0, log_variant=True), 1, 0)
        log_kernel = KernelSpec(variant="log_corrected", alphas=(1.6, 1.6))
        with pytest.raises(DomainError):
            mc_region_integral(log_kernel, RegionSpec(k=1, q=5.0, r=5.0), 1, 0)
        with pytest.raises(DomainError):
            mc_region_integral(ANISO, RegionSpec(k=2, q=5.0, r=5.0, subregion=(1, 1)), 10, 0)

    @pytest.mark.slow
    def test_proposal_mismatch_flagged(self):
        # far outside the validity region the integral is infinite; the
        # realized weights blow up and the guard must fire rather than return
        # a silent number (max/mean can only exceed 1e6 once n does)
        bad = KernelSpec(variant="anisotropic", alphas=(0.3, 0.3))
        with pytest.raises(ProposalMismatch):
            mc_region_integral(bad, RegionSpec(k=2, q=10.0, r=10.0), 2_500_000, seed=2)
