#!/usr/bin/env python3
"""
Monte Carlo verification of simulated ensembles against analytic moments.

Paths are centered Gaussian by construction, so a covariance is estimated by
mean(X_s X_t) and its standard error follows from Isserlis' theorem:
    Var(c_hat) = (c_ss c_tt + c_st^2) / n
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid

from lib.config import get_config
from lib.constants import HarnessDefaults
from lib.errors import require
from lib.mixture import ScheduleFamily, truncated_spec, truncation_gap
from lib.report_io import to_json
from lib.simulate import Method, PathGrid, Process, simulate_batch

logger = logging.getLogger(__name__)

Simulator = Callable[[int, int], np.ndarray]
CovarianceHandle = Callable[[float, float], float]
AutocovHandle = Callable[[float], float]

# Tolerated |empirical - analytic| when the standard error vanishes
ZERO_SE_ATOL = 1e-12


@dataclass(frozen=True)
class McCheck:
    """One empirical-vs-analytic comparison."""

    name: str
    empirical: float
    analytic: float
    z_score: float
    se: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "empirical": self.empirical,
            "analytic": self.analytic,
            "z_score": self.z_score,
            "se": self.se,
        }


@dataclass(frozen=True)
class McReport:
    """
    Outcome of a Monte Carlo test.

    ``passed`` holds iff max_abs_z <= z_max. Reports with acceptance=False are
    diagnostics: their verdict is informative and never gates a suite.
    """

    n_paths: int
    checks: Tuple[McCheck, ...]
    z_max: float
    label: str = ""
    acceptance: bool = True
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def max_abs_z(self) -> float:
        return max((abs(c.z_score) for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.z_max

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_paths": self.n_paths,
            "checks": [c.to_dict() for c in self.checks],
            "max_abs_z": self.max_abs_z,
            "z_max": self.z_max,
            "pass": self.passed,
            "label": self.label,
            "acceptance": self.acceptance,
            "details": dict(self.details),
        }

    def to_json(self) -> str:
        return to_json(self.to_dict())


def _z_max(z_max: Optional[float]) -> float:
    value = get_config().z_max() if z_max is None else float(z_max)
    require(value > 0.0, f"z_max={value} must be positive")
    return value


def _check_paths(n_paths: int) -> None:
    require(
        n_paths >= HarnessDefaults.MIN_PATHS,
        f"n_paths={n_paths} is below the minimum of {HarnessDefaults.MIN_PATHS} "
        f"for Gaussian standard errors",
    )


def _z(empirical: float, analytic: float, se: float) -> float:
    diff = empirical - analytic
    if se > 0.0:
        return diff / se
    return 0.0 if abs(diff) <= ZERO_SE_ATOL else math.copysign(math.inf, diff)


def _grid_index(grid: PathGrid, t: float) -> int:
    index = int(round(t / grid.step))
    require(
        0 <= index < grid.n_points
        and math.isclose(index * grid.step, t, abs_tol=1e-9 * grid.horizon),
        f"t={t} is not a point of the grid (T={grid.horizon}, N={grid.n_points})",
    )
    return index


def _simulate(simulator: Simulator, grid: PathGrid, seed: int, n_paths: int) -> np.ndarray:
    paths = np.asarray(simulator(seed, n_paths), dtype=float)
    require(
        paths.shape == (n_paths, grid.n_points),
        f"simulator returned shape {paths.shape}, expected {(n_paths, grid.n_points)}",
    )
    return paths


def _covariance_check(
    name: str, x: np.ndarray, y: np.ndarray, c_xx: float, c_yy: float, c_xy: float
) -> McCheck:
    n = x.size
    empirical = float(np.mean(x * y))
    se = math.sqrt(max(c_xx * c_yy + c_xy * c_xy, 0.0) / n)
    return McCheck(name, empirical, c_xy, _z(empirical, c_xy, se), se)


def _log_report(report: McReport) -> McReport:
    logger.debug(
        "MC %s: %d checks over %d paths, max |z| = %.3f (z_max %.1f)",
        report.label or "report",
        len(report.checks),
        report.n_paths,
        report.max_abs_z,
        report.z_max,
    )
    return report


def mc_cov_test(
    simulator: Simulator,
    analytic_cov: CovarianceHandle,
    grid: PathGrid,
    grid_pairs: Sequence[Tuple[float, float]],
    n_paths: int,
    seed: int,
    z_max: Optional[float] = None,
    label: str = "covariance",
) -> McReport:
    """
    Compare empirical covariances at grid time pairs with an analytic kernel.

    Args:
        simulator: Callable (seed, n_paths) -> (n_paths, N) array
        analytic_cov: Callable (s, t) -> covariance
        grid: Grid the simulator samples on
        grid_pairs: Time pairs (s, t), each a grid point
        n_paths: Number of paths (at least HarnessDefaults.MIN_PATHS)
        seed: Master seed
        z_max: Pass threshold (default from config)
        label: Report label

    Returns:
        McReport with one check per pair
    """
    _check_paths(n_paths)
    z_max = _z_max(z_max)
    require(len(grid_pairs) >= 1, "grid_pairs must not be empty")
    indices = [(_grid_index(grid, s), _grid_index(grid, t)) for s, t in grid_pairs]
    paths = _simulate(simulator, grid, seed, n_paths)

    checks: List[McCheck] = []
    for (s, t), (i, j) in zip(grid_pairs, indices):
        checks.append(
            _covariance_check(
                f"cov(s={s:g}, t={t:g})",
                paths[:, i],
                paths[:, j],
                float(analytic_cov(s, s)),
                float(analytic_cov(t, t)),
                float(analytic_cov(s, t)),
            )
        )
    return _log_report(McReport(n_paths, tuple(checks), z_max, label))


def mc_stationarity_test(
    simulator: Simulator,
    analytic_autocov: AutocovHandle,
    grid: PathGrid,
    lags: Sequence[int],
    anchors: Sequence[int],
    n_paths: int,
    seed: int,
    z_max: Optional[float] = None,
    label: str = "stationarity",
    acceptance: bool = True,
) -> McReport:
    """
    Check that the lag-l covariance of a stationary simulator does not depend on the anchor.

    For each integer grid lag l and anchor index a, mean(X_a X_{a+l}) is compared
    with analytic_autocov(l * step). Lag 0 is the variance check.

    Args:
        simulator: Callable (seed, n_paths) -> (n_paths, N) array
        analytic_autocov: Callable t -> autocovariance
        grid: Grid the simulator samples on
        lags: Grid lags l >= 0
        anchors: Anchor indices a with a + l < N
        n_paths: Number of paths
        seed: Master seed
        z_max: Pass threshold
        label: Report label
        acceptance: False for biased schemes (e.g. langevin_euler), whose report is a
            labeled diagnostic

    Returns:
        McReport with one check per (lag, anchor)
    """
    _check_paths(n_paths)
    z_max = _z_max(z_max)
    require(len(lags) >= 1 and len(anchors) >= 1, "need at least one lag and one anchor")
    for lag in lags:
        for a in anchors:
            require(
                lag >= 0 and a >= 0 and a + lag < grid.n_points,
                f"anchor {a} with lag {lag} leaves the grid of {grid.n_points} points",
            )
    paths = _simulate(simulator, grid, seed, n_paths)

    c0 = float(analytic_autocov(0.0))
    checks: List[McCheck] = []
    for lag in lags:
        c = float(analytic_autocov(lag * grid.step))
        for a in anchors:
            checks.append(
                _covariance_check(
                    f"lag={lag} anchor={a}", paths[:, a], paths[:, a + lag], c0, c0, c
                )
            )
    report = McReport(n_paths, tuple(checks), z_max, label, acceptance)
    if not acceptance and not report.passed:
        logger.info("%s: discretization bias detected (max |z| = %.2f)", label, report.max_abs_z)
    return _log_report(report)


@dataclass(frozen=True)
class GaussianityReport:
    """Largest per-grid-point sample skewness and excess kurtosis."""

    n_paths: int
    max_abs_skew: float
    max_abs_kurtosis: float
    skew_max: float
    kurtosis_max: float

    @property
    def passed(self) -> bool:
        return self.max_abs_skew <= self.skew_max and self.max_abs_kurtosis <= self.kurtosis_max

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_paths": self.n_paths,
            "max_abs_skew": self.max_abs_skew,
            "max_abs_kurtosis": self.max_abs_kurtosis,
            "skew_max": self.skew_max,
            "kurtosis_max": self.kurtosis_max,
            "pass": self.passed,
        }


def mc_gaussianity_test(
    simulator: Simulator,
    grid: PathGrid,
    n_paths: int,
    seed: int,
    skew_max: float = HarnessDefaults.SKEW_MAX,
    kurtosis_max: float = HarnessDefaults.KURTOSIS_MAX,
) -> GaussianityReport:
    """
    Per-grid-point skewness and excess kurtosis of the marginals.

    Grid points with zero sample variance (M_0 = 0) are skipped.
    """
    _check_paths(n_paths)
    paths = _simulate(simulator, grid, seed, n_paths)
    live = np.std(paths, axis=0) > 0.0
    require(bool(np.any(live)), "all marginals are degenerate")
    skew = stats.skew(paths[:, live], axis=0)
    kurt = stats.kurtosis(paths[:, live], axis=0, fisher=True)
    return GaussianityReport(
        n_paths,
        float(np.max(np.abs(skew))),
        float(np.max(np.abs(kurt))),
        skew_max,
        kurtosis_max,
    )


def mc_truncation_test(
    family: ScheduleFamily,
    k_lo: int,
    k_hi: int,
    grid: PathGrid,
    n_paths: int,
    seed: int,
    z_max: Optional[float] = None,
) -> McReport:
    """
    Empirical L2(Omega x [0, T]) gap between two nested truncations of a schedule.

    Both truncations are simulated with circulant_sum from the same seed, so
    their difference is exactly the sum of components k_lo+1..k_hi. The gap
    int_0^T (M^hi - M^lo)^2 dt is integrated with the trapezoid rule.

    Two checks are reported:
      * gap: the mean against its exact expectation on the grid
      * bound: one-sided, the mean may exceed the tail bound of the K = k_lo
        truncation by at most z_max standard errors

    Returns:
        McReport whose details hold the mean gap, the continuous-time gap and the tail bound
    """
    _check_paths(n_paths)
    z_max = _z_max(z_max)
    require(1 <= k_lo < k_hi, f"need 1 <= k_lo={k_lo} < k_hi={k_hi}")
    fam = family.family()
    coarse = truncated_spec(family, k_lo)
    fine = truncated_spec(family, k_hi)

    lo = simulate_batch(Process.MMFBM, coarse, grid, seed, n_paths, Method.CIRCULANT_SUM)
    hi = simulate_batch(Process.MMFBM, fine, grid, seed, n_paths, Method.CIRCULANT_SUM)
    times = grid.times
    gaps = trapezoid((hi - lo) ** 2, times, axis=1)
    mean = float(np.mean(gaps))
    se = float(np.std(gaps, ddof=1) / math.sqrt(n_paths))

    expected = 0.0
    for k in range(k_lo + 1, k_hi + 1):
        hurst = family.infinite_hurst(k)
        expected += fam.sigma(k) ** 2 * float(trapezoid(times ** (2.0 * hurst), times))
    tail_bound = max(1.0, grid.horizon**3) * fam.tail(k_lo)

    checks = (
        McCheck("gap", mean, expected, _z(mean, expected, se), se),
        McCheck("bound", mean, tail_bound, max(0.0, _z(mean, tail_bound, se)), se),
    )
    details = {
        "mean_gap": mean,
        "exact_gap": truncation_gap(family, k_lo, k_hi, grid.horizon),
        "tail_bound": tail_bound,
    }
    return _log_report(
        McReport(n_paths, checks, z_max, f"truncation {k_lo} -> {k_hi}", details=details)
    )


if __name__ == "__main__":
    from lib.kernels import mmfbm_cov
    from lib.mixture import MixtureSpec
    from lib.simulate import batch_simulator

    spec = MixtureSpec.from_pairs([(1.0, 0.5)])
    grid = PathGrid(1.0, 5)
    simulator = batch_simulator(Process.MMFBM, spec, grid, Method.CIRCULANT_SUM)
    report = mc_cov_test(
        simulator,
        lambda s, t: mmfbm_cov(spec, s, t).value,
        grid,
        [(0.5, 0.5), (0.25, 0.75)],
        10_000,
        seed=7,
    )
    print(report.to_json())
