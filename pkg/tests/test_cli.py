#!/usr/bin/env python3
"""
Tests for the command-line front end.
"""

import unittest
import sys
import os
import io
import json
import math
import shutil
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.cli import run
from lib.config import reload_config
from lib.constants import ExitCodes
from lib.suites import SuiteResult

BM = '{"components": [{"sigma": 1.0, "hurst": 0.5}]}'
BM_OU = '{"components": [{"sigma": 1.0, "hurst": 0.5}], "lambda": 1.0}'
SMOOTH = '{"components": [{"sigma": 1.0, "hurst": 0.75}]}'
ROUGH_SMOOTH = '{"components": [{"sigma": 1.0, "hurst": 0.3}, {"sigma": 1.0, "hurst": 0.7}]}'


class TestCli(unittest.TestCase):
    """Test cases for the mmfbm command."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)
        reload_config()

    def invoke(self, *argv):
        """Run the CLI and capture its streams."""
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_cov_ou(self):
        """Test the Bm-OU autocovariance e^{-1}/2."""
        code, out, _ = self.invoke("cov", "--spec", BM_OU, "--t", "1")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), math.exp(-1.0) / 2.0, places=12)

    def test_cov_lambda_flag(self):
        """Test --lambda turns an mmfBm spec into an mmfOU one."""
        code, out, _ = self.invoke("cov", "--spec", BM, "--lambda", "1", "--t", "1")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), math.exp(-1.0) / 2.0, places=12)

    def test_cov_mmfbm(self):
        """Test r(s, t) = min(s, t) for Bm."""
        code, out, _ = self.invoke("cov", "--spec", BM, "--t", "2", "--s", "0.5")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), 0.5, places=14)

    def test_spec_from_file(self):
        """Test the spec may be a file path."""
        path = Path(self.temp_dir) / "spec.json"
        path.write_text(BM)
        code, out, _ = self.invoke("cov", "--spec", str(path), "--t", "3")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), 3.0, places=14)

    def test_sd(self):
        """Test the spectral density of H = 0.75 at x = 2."""
        code, out, _ = self.invoke("sd", "--spec", SMOOTH, "--x", "2")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), 0.105786, places=5)

    def test_sd_cfs(self):
        """Test --x0 prints the CFS integral and its bound."""
        code, out, _ = self.invoke("sd", "--spec", BM, "--x0", "2")
        self.assertEqual(code, ExitCodes.OK)
        doc = json.loads(out)
        self.assertAlmostEqual(doc["integral"], math.log(1.0 / (2.0 * math.pi)) / 2.0, places=8)
        self.assertEqual(doc["x0"], 2.0)

    def test_pvar_limit(self):
        """Test the quadratic variation of Bm on [0, 2]."""
        code, out, _ = self.invoke("pvar", "--spec", BM, "--p", "2", "--horizon", "2")
        self.assertEqual(code, ExitCodes.OK)
        self.assertAlmostEqual(float(out), 2.0, places=12)

    def test_estimate_indices(self):
        """Test the analytic indices document."""
        code, out, _ = self.invoke("estimate", "--spec", ROUGH_SMOOTH, "--estimator", "indices")
        self.assertEqual(code, ExitCodes.OK)
        doc = json.loads(out)
        self.assertEqual(doc["holder_index"], 0.3)
        self.assertTrue(doc["lrd"])

    def test_truncate(self):
        """Test the truncation document."""
        schedule = '{"kind": "geometric", "h_lo": 0.3, "h_hi": 0.7}'
        code, out, _ = self.invoke("truncate", "--schedule", schedule, "--eps", "1e-6")
        self.assertEqual(code, ExitCodes.OK)
        doc = json.loads(out)
        self.assertEqual(doc["kind"], "geometric")
        self.assertEqual(len(doc["spec"]["components"]), doc["retained"])
        self.assertLessEqual(doc["tail_bound"], 1e-6)

    def test_simulate_to_file(self):
        """Test the CSV written by simulate."""
        path = Path(self.temp_dir) / "paths" / "bm.csv"
        code, _, _ = self.invoke(
            "simulate", "--spec", BM, "--grid-n", "5", "--paths", "2", "--out", str(path)
        )
        self.assertEqual(code, ExitCodes.OK)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "t,path_0,path_1")
        self.assertEqual(len(lines), 6)
        self.assertEqual(lines[1], "0,0,0")

    def test_simulate_reproducible(self):
        """Test the same seed prints the same bytes."""
        argv = ("simulate", "--spec", BM, "--grid-n", "9", "--seed", "5")
        self.assertEqual(self.invoke(*argv)[1], self.invoke(*argv)[1])

    def test_validation_errors(self):
        """Test malformed or invalid input exits with the validation code."""
        cases = (
            ("cov", "--spec", "{not json", "--t", "1"),
            ("cov", "--spec", BM),
            ("cov", "--spec", '{"components": [{"sigma": 1.0, "hurst": 1.5}]}', "--t", "1"),
            ("figures", "--out", self.temp_dir),
        )
        for argv in cases:
            code, _, err = self.invoke(*argv)
            self.assertEqual(code, ExitCodes.VALIDATION, argv)
            self.assertIn("error", err)

    def test_missing_config(self):
        """Test an unreadable --config exits with the I/O code."""
        missing = str(Path(self.temp_dir) / "missing.json")
        code, _, err = self.invoke("cov", "--config", missing, "--spec", BM, "--t", "1")
        self.assertEqual(code, ExitCodes.IO)
        self.assertIn("config", err)

    def test_verify_failure_exit(self):
        """Test a failed acceptance check exits with the numerical code."""
        failing = [SuiteResult("demo", False, "off by 1", 0.0)]
        with patch("lib.cli.run_suite", return_value=failing):
            code, out, _ = self.invoke("verify", "--suite", "quick")
        self.assertEqual(code, ExitCodes.CONVERGENCE)
        self.assertIn("0/1 checks passed", out)

    def test_verify_report_file(self):
        """Test --out writes the results as JSON."""
        passing = [SuiteResult("demo", True, "ok", 0.5)]
        path = Path(self.temp_dir) / "verify.json"
        with patch("lib.cli.run_suite", return_value=passing):
            code, _, _ = self.invoke("verify", "--out", str(path))
        self.assertEqual(code, ExitCodes.OK)
        doc = json.loads(path.read_text())
        self.assertEqual(doc["suite"], "quick")
        self.assertTrue(doc["results"][0]["passed"])


if __name__ == "__main__":
    unittest.main()
