#!/usr/bin/env python3
"""
Tests for the fBm, fGn, fOU and mixture covariance kernels.
"""

import unittest
import sys
import os
import math

import numpy as np
from scipy.linalg import toeplitz

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.errors import DomainError, ParameterError
from lib.kernels import (
    AsymptoticOrder,
    Branch,
    crossover_gap,
    fbm_cov,
    fgn_autocov,
    fgn_autocov_asymptotic,
    fgn_autocov_sequence,
    fou_autocov,
    fou_autocov_asymptotic,
    fou_autocov_gamma_form,
    fou_var0,
    mmfbm_cov,
    mmfbm_cov_matrix,
    mmfbm_increment_var,
    mmfbm_variogram_identity,
    mmfou_autocov,
    mmfou_autocov_asymptotic,
    mmfou_autocov_lags,
    mmfou_increment_var,
)
from lib.mixture import MixtureSpec


def rel_err(got, want):
    return abs(got - want) / abs(want)


class TestFbmKernels(unittest.TestCase):
    """Test cases for the fBm and mmfBm covariances."""

    def test_brownian_min(self):
        """Test r_{1/2}(t, s) = min(t, s)."""
        self.assertAlmostEqual(fbm_cov(0.5, 1.0, 2.0).value, 1.0, places=15)

    def test_diagonal(self):
        """Test r_H(t, t) = t^{2H}."""
        self.assertAlmostEqual(fbm_cov(0.75, 2.0, 2.0).value, 2.0**1.5, places=14)

    def test_off_diagonal(self):
        """Test a hand-evaluated off-diagonal value."""
        self.assertAlmostEqual(fbm_cov(0.75, 1.0, 2.0).value, 0.5 * 2.0**1.5, places=14)
        self.assertEqual(fbm_cov(0.75, 1.0, 2.0).branch, Branch.CLOSED_FORM)

    def test_mixture_sum(self):
        """Test the mixture covariance is the weighted component sum."""
        spec = MixtureSpec.from_pairs([(1.0, 0.25), (1.0, 0.75)])
        self.assertAlmostEqual(mmfbm_cov(spec, 1.0, 1.0).value, 2.0, places=15)

        spec = MixtureSpec.from_pairs([(0.5, 0.3), (2.0, 0.8)])
        want = 0.25 * fbm_cov(0.3, 0.7, 1.9).value + 4.0 * fbm_cov(0.8, 0.7, 1.9).value
        self.assertAlmostEqual(mmfbm_cov(spec, 0.7, 1.9).value, want, places=14)

    def test_single_component_reduces(self):
        """Test a unit single-component mixture is plain fBm."""
        spec = MixtureSpec.from_pairs([(1.0, 0.5)])
        for t, s in ((0.3, 0.9), (2.0, 1.0), (0.0, 1.0)):
            self.assertAlmostEqual(mmfbm_cov(spec, t, s).value, min(t, s), places=15)

    def test_cov_matrix(self):
        """Test the Gram matrix is symmetric, matches mmfbm_cov and is PSD."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (0.5, 0.7)])
        times = np.linspace(0.1, 1.0, 10)
        gram = mmfbm_cov_matrix(spec, times)
        np.testing.assert_allclose(gram, gram.T, rtol=0, atol=1e-15)
        self.assertAlmostEqual(gram[2, 7], mmfbm_cov(spec, times[2], times[7]).value, places=14)
        self.assertGreater(np.linalg.eigvalsh(gram).min(), 0.0)

    def test_self_similarity(self):
        """Test r_H(a t, a s) = a^{2H} r_H(t, s)."""
        for hurst in (0.1, 0.3, 0.5, 0.7, 0.9):
            for a in (0.1, 2.0, 37.5):
                for t, s in ((0.3, 0.9), (1.0, 1.0), (2.5, 0.4)):
                    want = a ** (2.0 * hurst) * fbm_cov(hurst, t, s).value
                    got = fbm_cov(hurst, a * t, a * s).value
                    self.assertLess(rel_err(got, want), 1e-12, f"H={hurst} a={a}")

    def test_exact_symmetry(self):
        """Test r(t, s) == r(s, t) bit for bit."""
        spec = MixtureSpec.from_pairs([(0.7, 0.15), (1.3, 0.55), (0.2, 0.95)])
        rng = np.random.default_rng(11)
        for t, s in rng.uniform(0.0, 5.0, size=(50, 2)):
            self.assertEqual(mmfbm_cov(spec, t, s).value, mmfbm_cov(spec, s, t).value)

    def test_gram_psd_random_grids(self):
        """Test the Gram matrix on random grids has min eigenvalue >= -1e-8 trace."""
        spec = MixtureSpec.from_pairs([(1.0, 0.1), (0.5, 0.5), (2.0, 0.9)])
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 65))
            times = np.sort(rng.uniform(0.0, 10.0, size=n))
            gram = mmfbm_cov_matrix(spec, times)
            self.assertGreaterEqual(np.linalg.eigvalsh(gram).min(), -1e-8 * np.trace(gram))

    def test_increment_variance(self):
        """Test the variogram sum_k sigma_k^2 h^{2H_k}."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (2.0, 0.7)])
        h = 0.01
        self.assertAlmostEqual(
            mmfbm_increment_var(spec, h), h**0.6 + 4.0 * h**1.4, places=15
        )
        self.assertEqual(mmfbm_increment_var(spec, 0.0), 0.0)
        # r(t+h, t+h) - 2 r(t+h, t) + r(t, t)
        t = 0.4
        direct = (
            mmfbm_cov(spec, t + h, t + h).value
            - 2.0 * mmfbm_cov(spec, t + h, t).value
            + mmfbm_cov(spec, t, t).value
        )
        self.assertAlmostEqual(mmfbm_increment_var(spec, h), direct, places=12)

    def test_negative_time_rejected(self):
        """Test that negative times are a parameter error."""
        with self.assertRaises(ParameterError):
            fbm_cov(0.5, -1.0, 1.0)
        with self.assertRaises(ParameterError):
            mmfbm_cov(MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.3)]), 1.0, 1.0)


class TestFgnKernels(unittest.TestCase):
    """Test cases for increment autocovariances."""

    def test_brownian_increments_uncorrelated(self):
        """Test rho_{1/2}(delta; t) = 0."""
        spec = MixtureSpec.from_pairs([(1.0, 0.5)])
        for delta, t in ((1.0, 1.0), (1.0, 10.0), (0.25, 3.0)):
            self.assertAlmostEqual(fgn_autocov(spec, delta, t).value, 0.0, places=14)

    def test_hand_value(self):
        """Test H = 0.75, delta = 1, t = 10 against direct arithmetic."""
        spec = MixtureSpec.from_pairs([(1.0, 0.75)])
        want = 0.5 * (11.0**1.5 + 9.0**1.5 - 2.0 * 10.0**1.5)
        self.assertAlmostEqual(fgn_autocov(spec, 1.0, 10.0).value, want, places=12)
        self.assertAlmostEqual(want, 0.1187, places=3)

    def test_variogram_identity(self):
        """Test rho(delta; t) = r(t+delta, delta) - r(t, delta)."""
        spec = MixtureSpec.from_pairs([(1.0, 0.25), (0.7, 0.6), (1.3, 0.9)])
        for delta, t in ((1.0, 1.0), (0.5, 2.0), (1.0, 20.0)):
            self.assertAlmostEqual(
                fgn_autocov(spec, delta, t).value,
                mmfbm_variogram_identity(spec, delta, t),
                places=10,
            )

    def test_asymptotic_decay(self):
        """Test the leading-order decay converges to the exact autocovariance."""
        spec = MixtureSpec.from_pairs([(1.0, 0.75)])
        errors = [
            rel_err(fgn_autocov_asymptotic(spec, 1.0, t).value, fgn_autocov(spec, 1.0, t).value)
            for t in (10.0, 1e3, 1e4)
        ]
        self.assertGreater(errors[0], errors[1])
        self.assertLess(errors[1], 1e-6)
        self.assertLess(errors[2], 1e-6)
        self.assertEqual(
            fgn_autocov_asymptotic(MixtureSpec.from_pairs([(1.0, 0.5)]), 1.0, 5.0).value, 0.0
        )

    def test_lag_must_cover_delta(self):
        """Test t < delta is rejected."""
        spec = MixtureSpec.from_pairs([(1.0, 0.7)])
        with self.assertRaises(ParameterError):
            fgn_autocov(spec, 1.0, 0.5)
        with self.assertRaises(ParameterError):
            fgn_autocov(spec, 0.0, 1.0)

    def test_sequence(self):
        """Test the lattice autocovariance of unit fGn."""
        np.testing.assert_allclose(fgn_autocov_sequence(0.5, 4), [1, 0, 0, 0, 0], atol=1e-15)
        seq = fgn_autocov_sequence(0.7, 3, step=0.5)
        spec = MixtureSpec.from_pairs([(1.0, 0.7)])
        self.assertAlmostEqual(seq[0], 0.5**1.4, places=15)
        self.assertAlmostEqual(seq[2], fgn_autocov(spec, 0.5, 1.0).value, places=14)


class TestFouKernels(unittest.TestCase):
    """Test cases for the fOU autocovariance and its branches."""

    def test_h_half_exact(self):
        """Test rho_{lam,1/2}(t) = e^{-lam t}/(2 lam)."""
        kv = fou_autocov(2.0, 0.5, 1.0)
        self.assertAlmostEqual(kv.value, math.exp(-2.0) / 4.0, places=15)
        self.assertEqual(kv.branch, Branch.SPECIAL_CASE_H_HALF)

    def test_variance_at_zero(self):
        """Test rho(0) is the stationary variance."""
        for lam, hurst in ((1.0, 0.3), (2.5, 0.7), (0.5, 0.9)):
            kv = fou_autocov(lam, hurst, 0.0)
            want = lam ** (-2 * hurst) * hurst * math.gamma(2 * hurst)
            self.assertAlmostEqual(kv.value, want, places=13)
            self.assertEqual(kv.branch, Branch.CLOSED_FORM)
        self.assertAlmostEqual(fou_var0(1.0, 0.7), 0.7 * math.gamma(1.4), places=14)
        self.assertAlmostEqual(fou_var0(1.0, 0.5), 0.5, places=15)

    def test_quadrature_continuous_at_zero(self):
        """Test the quadrature branch tends to the stationary variance."""
        for hurst in (0.3, 0.7):
            near = fou_autocov(1.0, hurst, 1e-9).value
            self.assertLess(rel_err(near, fou_var0(1.0, hurst)), 1e-4)

    def test_gamma_form_agrees(self):
        """Test the quadrature branch against the incomplete-gamma form."""
        for hurst, t in ((0.7, 1.0), (0.75, 2.0), (0.9, 5.0), (0.6, 0.3)):
            kv = fou_autocov(1.0, hurst, t)
            self.assertEqual(kv.branch, Branch.QUADRATURE)
            self.assertLess(rel_err(kv.value, fou_autocov_gamma_form(1.0, hurst, t).value), 1e-8)

    def test_gamma_form_h_half(self):
        """Test the gamma form reduces to the Ornstein-Uhlenbeck kernel."""
        for t in (0.0, 0.5, 3.0):
            self.assertAlmostEqual(
                fou_autocov_gamma_form(1.5, 0.5, t).value, math.exp(-1.5 * t) / 3.0, places=14
            )

    def test_gamma_form_rejects_rough(self):
        """Test H < 1/2 is a domain error for the gamma form."""
        with self.assertRaises(DomainError):
            fou_autocov_gamma_form(1.0, 0.3, 1.0)

    def test_symmetric_in_lag(self):
        """Test rho(-t) = rho(t)."""
        self.assertEqual(fou_autocov(1.0, 0.3, -2.0).value, fou_autocov(1.0, 0.3, 2.0).value)

    def test_asymptotic_terms(self):
        """Test the plug-in values of the large-lag expansion."""
        self.assertEqual(fou_autocov_asymptotic(1.0, 0.5, 10.0, 5).value, 0.0)
        for t in (10.0, 100.0):
            kv = fou_autocov_asymptotic(1.0, 0.7, t, AsymptoticOrder(1))
            self.assertAlmostEqual(kv.value, 0.28 * t**-0.6, places=14)
            self.assertEqual(kv.branch, Branch.ASYMPTOTIC)
        with self.assertRaises(ParameterError):
            fou_autocov_asymptotic(1.0, 0.7, 10.0, 0)

    def test_branch_selection(self):
        """Test the crossover switches to the asymptotic branch."""
        self.assertEqual(fou_autocov(1.0, 0.3, 39.0).branch, Branch.QUADRATURE)
        self.assertEqual(fou_autocov(1.0, 0.3, 41.0).branch, Branch.ASYMPTOTIC)
        self.assertEqual(fou_autocov(2.0, 0.3, 21.0).branch, Branch.ASYMPTOTIC)
        self.assertEqual(fou_autocov(1.0, 0.3, 41.0, crossover=math.inf).branch, Branch.QUADRATURE)

    def test_crossover_continuity(self):
        """Test both branches agree around the crossover."""
        for hurst in (0.1, 0.3, 0.7, 0.9):
            self.assertLessEqual(crossover_gap(1.0, hurst, 40.0), 1e-8)
            self.assertLessEqual(crossover_gap(1.0, hurst, 25.0), 1e-6)
        self.assertEqual(crossover_gap(1.0, 0.5, 40.0), 0.0)

    def test_rate_validation(self):
        """Test lambda <= 0 is rejected."""
        for lam in (0.0, -1.0, math.inf):
            with self.assertRaises(ParameterError):
                fou_autocov(lam, 0.7, 1.0)


class TestMmfouKernels(unittest.TestCase):
    """Test cases for the mixture fOU kernels."""

    def test_variance(self):
        """Test rho_lam(0) for single and mixed specs."""
        self.assertAlmostEqual(
            mmfou_autocov(MixtureSpec.from_pairs([(1.0, 0.5)]), 1.0, 0.0).value, 0.5, places=15
        )
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        want = 0.3 * math.gamma(0.6) + 0.7 * math.gamma(1.4)
        self.assertAlmostEqual(mmfou_autocov(spec, 1.0, 0.0).value, want, places=13)
        self.assertAlmostEqual(want, 1.06784, places=4)

    def test_branch_is_least_exact(self):
        """Test a mixed sum reports its least exact branch."""
        spec = MixtureSpec.from_pairs([(1.0, 0.5), (1.0, 0.7)])
        self.assertEqual(mmfou_autocov(spec, 1.0, 1.0).branch, Branch.QUADRATURE)
        self.assertEqual(mmfou_autocov(spec, 1.0, 50.0).branch, Branch.ASYMPTOTIC)

    def test_asymptotic_close_at_large_lag(self):
        """Test the mixture expansion is within 1% at lam t = 50."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        exact = mmfou_autocov(spec, 1.0, 50.0, crossover=math.inf).value
        approx = mmfou_autocov_asymptotic(spec, 1.0, 50.0).value
        self.assertLess(rel_err(approx, exact), 0.01)
        self.assertEqual(
            mmfou_autocov_asymptotic(MixtureSpec.from_pairs([(1.0, 0.5)]), 1.0, 5.0).value, 0.0
        )

    def test_lags(self):
        """Test vectorized evaluation over lags."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (0.5, 0.8)])
        lags = [0.0, 0.5, 2.0]
        values = mmfou_autocov_lags(spec, 1.0, lags)
        self.assertEqual(values.shape, (3,))
        self.assertAlmostEqual(values[1], mmfou_autocov(spec, 1.0, 0.5).value, places=15)

    def test_increment_variance_h_half(self):
        """Test 2(rho(0) - rho(h)) = (1 - e^{-lam h})/lam for H = 1/2."""
        spec = MixtureSpec.from_pairs([(1.0, 0.5)])
        for h in (1e-3, 0.5, 2.0):
            self.assertAlmostEqual(
                mmfou_increment_var(spec, 2.0, h), (1.0 - math.exp(-2.0 * h)) / 2.0, places=13
            )
        self.assertEqual(mmfou_increment_var(spec, 2.0, 0.0), 0.0)

    def test_increment_variance_branches_agree(self):
        """Test the small-lag form against the covariance difference."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        h = 1.0
        direct = 2.0 * (mmfou_autocov(spec, 1.0, 0.0).value - mmfou_autocov(spec, 1.0, h).value)
        self.assertLess(rel_err(mmfou_increment_var(spec, 1.0, h), direct), 1e-9)

    def test_increment_variance_small_lag(self):
        """Test the increments behave like the mmfBm variogram as h -> 0."""
        single = MixtureSpec.from_pairs([(1.0, 0.7)])
        h = 1e-4
        ratio = mmfou_increment_var(single, 1.0, h) / mmfbm_increment_var(single, h)
        self.assertAlmostEqual(ratio, 1.0, delta=1e-2)

        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        h = 1e-3
        ratio = mmfou_increment_var(spec, 1.0, h) / mmfbm_increment_var(spec, h)
        self.assertAlmostEqual(ratio, 1.0, delta=1e-2)

    def test_toeplitz_psd(self):
        """Test the 64-point equidistant autocovariance matrix is PSD."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        for step in (0.01, 0.1, 1.0):
            row = mmfou_autocov_lags(spec, 1.0, step * np.arange(64))
            cov = toeplitz(row)
            self.assertGreaterEqual(np.linalg.eigvalsh(cov).min(), -1e-8 * np.trace(cov))

    def test_psd_random_grids(self):
        """Test [rho(|t_i - t_j|)] on random grids is PSD."""
        spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
        rng = np.random.default_rng(5)
        for _ in range(3):
            n = int(rng.integers(2, 21))
            times = np.sort(rng.uniform(0.0, 5.0, size=n))
            lags = np.abs(times[:, None] - times[None, :])
            values, inverse = np.unique(lags, return_inverse=True)
            cov = mmfou_autocov_lags(spec, 1.0, values)[inverse].reshape(n, n)
            self.assertGreaterEqual(np.linalg.eigvalsh(cov).min(), -1e-8 * np.trace(cov))


if __name__ == "__main__":
    unittest.main()
