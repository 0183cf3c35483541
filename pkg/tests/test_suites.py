#!/usr/bin/env python3
"""
Tests for the acceptance suites.
"""

import unittest
import sys
import os
from unittest.mock import patch

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.errors import MixtureError, ParameterError
from lib.suites import (
    SUITES,
    SuiteResult,
    check_crossover,
    check_ou_closed_form,
    check_variance_identity,
    format_table,
    run_suite,
)


class TestDeterministicChecks(unittest.TestCase):
    """Test cases for the cheap deterministic checks."""

    def test_ou_closed_form(self):
        """Test the H = 1/2 kernel check passes."""
        passed, detail = check_ou_closed_form()
        self.assertTrue(passed, detail)
        self.assertIn("rel err", detail)

    def test_variance_identity(self):
        """Test the stationary variance check passes."""
        passed, detail = check_variance_identity()
        self.assertTrue(passed, detail)

    def test_crossover(self):
        """Test the quadrature/expansion crossover check passes."""
        passed, detail = check_crossover()
        self.assertTrue(passed, detail)
        self.assertIn("lam*t=40", detail)


class TestRunSuite(unittest.TestCase):
    """Test cases for run_suite."""

    def test_unknown_suite(self):
        """Test an unknown suite name is rejected."""
        self.assertEqual(SUITES, ("quick", "full"))
        with self.assertRaises(MixtureError):
            run_suite("bogus")

    def test_failing_check_recorded(self):
        """Test a raising check is recorded as failed and later checks still run."""

        def broken():
            raise ParameterError("lam=-1 must be > 0")

        checks = [("broken", broken), ("fine", lambda: (True, "ok"))]
        with patch("lib.suites._checks", return_value=checks):
            results = run_suite("quick", 1)
        self.assertEqual([r.name for r in results], ["broken", "fine"])
        self.assertFalse(results[0].passed)
        self.assertIn("ParameterError", results[0].detail)
        self.assertTrue(results[1].passed)
        self.assertGreaterEqual(results[1].seconds, 0.0)


class TestFormatTable(unittest.TestCase):
    """Test cases for format_table."""

    def test_layout(self):
        """Test the header, verdicts and summary line."""
        results = [
            SuiteResult("ou_closed_form", True, "max rel err 1.00e-16", 0.01),
            SuiteResult("lrd_slope", False, "slope -0.5", 1.5),
        ]
        lines = format_table(results).splitlines()
        self.assertTrue(lines[0].startswith("check"))
        self.assertIn("result", lines[0])
        self.assertTrue(set(lines[1]) == {"="})
        self.assertIn("PASS", lines[2])
        self.assertIn("FAIL", lines[3])
        self.assertIn("1.50", lines[3])
        self.assertEqual(lines[-1], "1/2 checks passed")

    def test_empty(self):
        """Test an empty result list still renders."""
        self.assertEqual(format_table([]).splitlines()[-1], "0/0 checks passed")


if __name__ == "__main__":
    unittest.main()
