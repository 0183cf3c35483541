#!/usr/bin/env python3
"""
Tests for gamma functions and the quadrature wrapper.
"""

import unittest
import sys
import os
import math

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.errors import ConvergenceError, DomainError, ParameterError
from lib.special import (
    QuadratureSpec,
    abs_moment,
    gamma_fn,
    inc_gamma_pos,
    inc_gamma_pos_series,
    integrate,
    upper_gamma_reg,
)


def lentz_upper_gamma(a, x, iterations=400):
    """Regularized upper incomplete gamma by its continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, iterations + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


class TestGamma(unittest.TestCase):
    """Test cases for gamma_fn and abs_moment."""

    def test_known_values(self):
        """Test Gamma at 1, 2 and 1.4."""
        self.assertAlmostEqual(gamma_fn(1.0), 1.0, places=14)
        self.assertAlmostEqual(gamma_fn(2.0), 1.0, places=14)
        self.assertAlmostEqual(gamma_fn(1.4), 0.8872638175030753, places=13)

    def test_recurrence(self):
        """Test Gamma(a + 1) = a Gamma(a)."""
        for i in range(1, 10):
            a = i / 10
            self.assertLess(abs(gamma_fn(a + 1) / (a * gamma_fn(a)) - 1.0), 1e-12)

    def test_poles_rejected(self):
        """Test alpha <= 0 is a domain error."""
        for bad in (0.0, -1.0, -0.5):
            with self.assertRaises(DomainError):
                gamma_fn(bad)

    def test_abs_moment(self):
        """Test Gaussian absolute moments."""
        self.assertAlmostEqual(abs_moment(0.0), 1.0, places=14)
        self.assertAlmostEqual(abs_moment(1.0), math.sqrt(2.0 / math.pi), places=14)
        for m, double_factorial in ((1, 1.0), (2, 3.0), (3, 15.0)):
            self.assertLess(abs(abs_moment(2.0 * m) - double_factorial), 1e-12)
        with self.assertRaises(ParameterError):
            abs_moment(-1.0)


class TestIncompleteGamma(unittest.TestCase):
    """Test cases for the incomplete gamma integrals."""

    def test_pos_at_zero(self):
        """Test the empty integral."""
        self.assertEqual(inc_gamma_pos(0.3, 0.0), 0.0)
        self.assertEqual(inc_gamma_pos_series(0.3, 0.0), 0.0)

    def test_pos_against_series(self):
        """Test quadrature against the term-by-term series."""
        self.assertAlmostEqual(inc_gamma_pos(0.5, 1.0), 1.6503, places=3)
        for alpha in (0.1, 0.5, 0.9):
            for x in (0.1, 1.0, 5.0, 20.0):
                quad = inc_gamma_pos(alpha, x)
                series = inc_gamma_pos_series(alpha, x)
                self.assertLess(abs(quad - series), 1e-10 * max(1.0, series))

    def test_pos_monotone(self):
        """Test gamma_alpha(x) is nondecreasing in x."""
        values = [inc_gamma_pos(0.5, x) for x in (0.0, 0.5, 1.0, 2.0, 4.0)]
        self.assertEqual(values, sorted(values))
        self.assertGreater(values[-1], values[-2])

    def test_pos_large_argument(self):
        """Test large x stays finite up to the double range, then gives inf."""
        below = inc_gamma_pos(0.5, 699.5)
        above = inc_gamma_pos(0.5, 700.5)
        self.assertTrue(math.isfinite(above))
        want = math.e * math.sqrt(699.5 / 700.5)
        self.assertLess(abs(above / below / want - 1.0), 1e-5)
        self.assertGreater(inc_gamma_pos(0.5, 705.0), above)
        self.assertEqual(inc_gamma_pos(0.5, 800.0), math.inf)
        self.assertEqual(inc_gamma_pos(0.9, 1e4), math.inf)

    def test_upper_limits(self):
        """Test Gamma_alpha(0) = 1 and the decay at infinity."""
        self.assertAlmostEqual(upper_gamma_reg(0.5, 0.0), 1.0, places=14)
        self.assertEqual(upper_gamma_reg(0.5, math.inf), 0.0)
        self.assertLess(upper_gamma_reg(0.5, 50.0), 1e-20)

    def test_upper_against_continued_fraction(self):
        """Test Gamma_alpha(x) against a Lentz continued fraction."""
        for alpha in (0.1, 0.5, 0.9):
            for x in (1.0, 3.0, 10.0):
                want = lentz_upper_gamma(alpha, x)
                self.assertLess(abs(upper_gamma_reg(alpha, x) / want - 1.0), 1e-10)

    def test_upper_half_is_erfc(self):
        """Test Gamma_{1/2}(x) = erfc(sqrt(x))."""
        for x in (0.25, 1.0, 4.0):
            self.assertAlmostEqual(upper_gamma_reg(0.5, x), math.erfc(math.sqrt(x)), places=14)

    def test_upper_monotone(self):
        """Test Gamma_alpha(x) is nonincreasing in x."""
        values = [upper_gamma_reg(0.7, x) for x in (0.0, 0.1, 1.0, 2.0, 8.0)]
        self.assertEqual(values, sorted(values, reverse=True))

    def test_alpha_range(self):
        """Test that alpha outside (0, 1) is rejected."""
        for fn in (inc_gamma_pos, upper_gamma_reg, inc_gamma_pos_series):
            for alpha in (-0.5, 0.0, 1.0, 1.5):
                with self.assertRaises(DomainError):
                    fn(alpha, 1.0)
            with self.assertRaises(DomainError):
                fn(0.5, -1.0)


class TestIntegrate(unittest.TestCase):
    """Test cases for the quadrature wrapper."""

    def test_constant(self):
        """Test the integral of 1 over [0, 1]."""
        self.assertAlmostEqual(integrate(lambda s: 1.0, 0.0, 1.0), 1.0, places=14)

    def test_empty_interval(self):
        """Test a zero-length interval."""
        self.assertEqual(integrate(lambda s: 1.0 / s, 2.0, 2.0), 0.0)

    def test_endpoint_singularity(self):
        """Test s^-1/2 on [0, 1] through the substitution."""
        self.assertAlmostEqual(integrate(lambda s: 1.0, 0.0, 1.0, singularity=-0.5), 2.0, places=12)

    def test_infinite_range(self):
        """Test the integral of e^-s s^-1/2 over [0, inf) equals sqrt(pi)."""
        value = integrate(lambda s: math.exp(-s), 0.0, math.inf, singularity=-0.5)
        self.assertAlmostEqual(value, math.sqrt(math.pi), places=10)

    def test_positive_singularity(self):
        """Test a declared s^(1/2) factor."""
        value = integrate(lambda s: 1.0, 0.0, 1.0, singularity=0.5)
        self.assertAlmostEqual(value, 2.0 / 3.0, places=12)

    def test_bad_singularity(self):
        """Test that an exponent <= -1 is a domain error."""
        with self.assertRaises(DomainError):
            integrate(lambda s: 1.0, 0.0, 1.0, singularity=-1.0)

    def test_convergence_failure(self):
        """Test a starved subdivision budget raises ConvergenceError."""
        q = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=1)
        with self.assertRaises(ConvergenceError) as ctx:
            integrate(lambda s: math.sin(200.0 * s) ** 2, 0.0, 10.0, q)
        self.assertIsNotNone(ctx.exception.estimate)

    def test_spec_validation(self):
        """Test QuadratureSpec rejects non-positive settings."""
        with self.assertRaises(ParameterError):
            QuadratureSpec(abs_tol=0.0)
        with self.assertRaises(ParameterError):
            QuadratureSpec(max_subdivisions=0)


if __name__ == "__main__":
    unittest.main()
