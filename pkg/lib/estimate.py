#!/usr/bin/env python3
"""
Path functionals and their analytic targets.

Covers equidistant p-variation sums, variogram regression for the Hölder
index, log-log decay slopes for long-range dependence, and Monte Carlo
convergence studies of the p-variation.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from lib.errors import ParameterError, require
from lib.kernels import mmfbm_increment_var, mmfou_increment_var
from lib.mixture import MixtureSpec, check_rate, ensure_valid
from lib.report_io import write_csv
from lib.simulate import Method, PathGrid, Process, SamplePath, simulate_batch
from lib.special import abs_moment

logger = logging.getLogger(__name__)

MIN_HOLDER_PATHS = 100
ZERO_AUTOCOV = 1e-12

PathLike = Union[SamplePath, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class EstimateReport:
    """Estimator output with its analytic target and uncertainty."""

    estimate: float
    target: float
    n_used: int
    stderr_or_band: float
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "target": self.target,
            "n_used": self.n_used,
            "stderr_or_band": self.stderr_or_band,
            "label": self.label,
        }


def _values(path: PathLike) -> np.ndarray:
    if isinstance(path, SamplePath):
        return np.asarray(path.values, dtype=float)
    return np.asarray(path, dtype=float)


# Analytic indices


def holder_index(spec: MixtureSpec) -> float:
    """Hölder index of mmfBm and mmfOU paths: H_inf."""
    return ensure_valid(spec).h_inf


def pvar_index(spec: MixtureSpec) -> float:
    """Critical p-variation order 1/H_inf."""
    return 1.0 / holder_index(spec)


def is_lrd(spec: MixtureSpec) -> bool:
    """Long-range dependence holds iff some H_k > 1/2."""
    return ensure_valid(spec).h_sup > 0.5


def lrd_target(spec: MixtureSpec) -> float:
    """Decay exponent 2 H_sup - 2 of the increment (or mmfOU) autocovariance."""
    return 2.0 * ensure_valid(spec).h_sup - 2.0


# p-variation


def pvar_empirical(path: PathLike, p: float) -> float:
    """Sum of |X_{t_k} - X_{t_{k-1}}|^p over the grid."""
    require(p > 0.0, f"p={p} must be positive")
    values = _values(path)
    require(values.ndim == 1 and values.size >= 2, "path needs at least 2 points")
    return float(np.sum(np.abs(np.diff(values)) ** p))


def pvar_limit(spec: MixtureSpec, p: float, horizon: float) -> float:
    """
    Limit of the equidistant p-variation of the mmfBm and the mmfOU on [0, T].

    Returns +inf if p H_inf < 1, T (sum_{H_k = H_inf} sigma_k^2)^{p/2} mu_p if
    p H_inf = 1, and 0 if p H_inf > 1. The critical case is detected with a
    relative tolerance of 1e-12 so that p = 1/H_inf computed in floating point
    is recognized.
    """
    ensure_valid(spec)
    require(p > 0.0, f"p={p} must be positive")
    require(horizon > 0.0, f"T={horizon} must be positive")
    ph = p * spec.h_inf
    if math.isclose(ph, 1.0, rel_tol=1e-12):
        weight = sum(c.sigma**2 for c in spec if c.hurst == spec.h_inf)
        return horizon * weight ** (p / 2.0) * abs_moment(p)
    return math.inf if ph < 1.0 else 0.0


def pvar_expected(
    spec: MixtureSpec, p: float, horizon: float, n: int, lam: Optional[float] = None
) -> float:
    """
    Exact mean of the p-variation sum over n equidistant steps.

    Increments are centered Gaussian with variance v(T/n), so the mean is
    n v(T/n)^{p/2} mu_p with the mmfBm (or, given lam, stationary mmfOU) variogram v.
    """
    ensure_valid(spec)
    require(n >= 1, f"n={n} must be at least 1")
    h = horizon / n
    if lam is None:
        var = mmfbm_increment_var(spec, h)
    else:
        var = mmfou_increment_var(spec, check_rate(lam), h)
    return n * var ** (p / 2.0) * abs_moment(p)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    empirical: float
    target: float
    abs_err: float
    expected: float
    stderr: float


def pvar_convergence_study(
    spec: MixtureSpec,
    p: float,
    horizon: float,
    n_list: Sequence[int],
    seeds: Sequence[int],
    lam: Optional[float] = None,
    method=None,
) -> List[ConvergenceRow]:
    """
    Monte Carlo mean of the p-variation sum for each partition size n.

    Every seed contributes one path per n. Without lam the mmfBm is simulated
    (circulant_sum by default); with lam the mmfOU (langevin_euler by default,
    since dense factorization does not scale to fine partitions).

    Args:
        spec: Mixture
        p: Order p > 0
        horizon: T
        n_list: Increasing partition sizes
        seeds: Seeds, one path each
        lam: Optional rate for the mmfOU
        method: Simulation method override

    Returns:
        One ConvergenceRow per n
    """
    ensure_valid(spec)
    require(len(seeds) >= 1, "need at least one seed")
    require(
        all(a < b for a, b in zip(n_list, list(n_list)[1:])),
        f"n_list={list(n_list)} must be increasing",
    )
    if lam is None:
        process = Process.MMFBM
        method = Method.CIRCULANT_SUM if method is None else method
    else:
        process = Process.MMFOU
        method = Method.LANGEVIN_EULER if method is None else method

    target = pvar_limit(spec, p, horizon)
    rows: List[ConvergenceRow] = []
    for n in n_list:
        grid = PathGrid(horizon, int(n) + 1)
        sums = []
        for seed in seeds:
            values = simulate_batch(process, spec, grid, seed, 1, method, lam)[0]
            sums.append(pvar_empirical(values, p))
        mean = float(np.mean(sums))
        stderr = float(np.std(sums, ddof=1) / math.sqrt(len(sums))) if len(sums) > 1 else 0.0
        rows.append(
            ConvergenceRow(
                n=int(n),
                empirical=mean,
                target=target,
                abs_err=abs(mean - target),
                expected=pvar_expected(spec, p, horizon, int(n), lam),
                stderr=stderr,
            )
        )
        logger.debug("p-variation n=%d mean=%.6g target=%.6g", n, mean, target)
    return rows


def write_convergence_csv(rows: Sequence[ConvergenceRow], path: Path, digits: int = 17) -> Path:
    """Write the (n, empirical, target, abs_err) table."""
    return write_csv(
        path,
        ["n", "empirical", "target", "abs_err"],
        ((r.n, r.empirical, r.target, r.abs_err) for r in rows),
        digits,
    )


# Hölder index


def _slope_report(
    x: np.ndarray, y: np.ndarray, scale: float, target: float, label: str
) -> EstimateReport:
    fit = stats.linregress(x, y)
    stderr = float(fit.stderr) if x.size > 2 else 0.0
    return EstimateReport(float(fit.slope) * scale, target, int(x.size), abs(stderr * scale), label)


def _decade(lags: Sequence[int]) -> np.ndarray:
    lags = np.unique(np.asarray(lags, dtype=int))
    require(lags.size >= 1 and lags[0] >= 1, "lags must be positive integers")
    return lags[lags <= 10 * lags[0]]


def holder_estimate(
    paths: Union[Sequence[SamplePath], np.ndarray],
    lags: Sequence[int],
    step: Optional[float] = None,
    spec: Optional[MixtureSpec] = None,
) -> EstimateReport:
    """
    Variogram estimate of the Hölder index.

    Regresses log of the empirical Var(X_{t+h} - X_t), pooled over all paths
    and positions, on log h over the smallest decade of lags; the estimate is
    half the slope.

    Args:
        paths: SamplePaths or an (n_paths, N) array
        lags: Integer grid lags (dyadic, e.g. 1, 2, 4, 8)
        step: Grid spacing (taken from the SamplePaths when omitted)
        spec: Mixture whose H_inf becomes the target

    Raises:
        ParameterError: With fewer than 2 usable lags or too few paths
    """
    if isinstance(paths, np.ndarray):
        values = np.atleast_2d(paths)
    else:
        require(len(paths) > 0, "no paths given")
        values = np.stack([_values(p) for p in paths])
        if step is None and isinstance(paths[0], SamplePath):
            step = paths[0].grid.step
    step = 1.0 if step is None else step
    require(
        values.shape[0] >= MIN_HOLDER_PATHS,
        f"holder_estimate needs at least {MIN_HOLDER_PATHS} paths, got {values.shape[0]}",
    )

    used = [lag for lag in _decade(lags) if lag < values.shape[1]]
    if len(used) < 2:
        raise ParameterError(f"need at least 2 usable lags within the grid, got {used}")

    variogram = np.array([np.mean((values[:, lag:] - values[:, :-lag]) ** 2) for lag in used])
    target = holder_index(spec) if spec is not None else math.nan
    return _slope_report(
        np.log(np.asarray(used) * step), np.log(variogram), 0.5, target, "variogram regression"
    )


def holder_estimate_analytic(
    spec: MixtureSpec, steps: Sequence[float], lam: Optional[float] = None
) -> EstimateReport:
    """Variogram regression on the exact increment variances at the given h values."""
    ensure_valid(spec)
    h = np.asarray(steps, dtype=float)
    require(h.size >= 2 and bool(np.all(h > 0.0)), "need at least 2 positive steps")
    if lam is None:
        variogram = np.array([mmfbm_increment_var(spec, v) for v in h])
    else:
        variogram = np.array([mmfou_increment_var(spec, lam, v) for v in h])
    return _slope_report(np.log(h), np.log(variogram), 0.5, spec.h_inf, "analytic variogram")


# Long-range dependence


def lrd_slope(
    autocov: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    n_pts: int,
    spec: Optional[MixtureSpec] = None,
) -> EstimateReport:
    """
    Log-log regression slope of an analytic autocovariance on [t_lo, t_hi].

    Args:
        autocov: Kernel handle t -> covariance
        t_lo: Window start (> 0)
        t_hi: Window end (> t_lo)
        n_pts: Number of log-spaced evaluation points
        spec: Mixture; supplies the target 2 H_sup - 2 and the SRD check

    Raises:
        ParameterError: For an SRD mixture, a vanishing kernel, or a
            non-positive value inside the window (naming the offending t)
    """
    require(t_hi > t_lo > 0.0, f"need t_hi={t_hi} > t_lo={t_lo} > 0")
    require(n_pts >= 2, f"n_pts={n_pts} must be at least 2")
    if spec is not None and not is_lrd(spec):
        raise ParameterError(
            f"short-range dependent mixture (H_sup={spec.h_sup} <= 1/2): no polynomial tail to fit"
        )

    t = np.geomspace(t_lo, t_hi, n_pts)
    values = np.array([float(autocov(float(v))) for v in t])
    if np.all(np.abs(values) < ZERO_AUTOCOV):
        raise ParameterError("autocovariance vanishes on the window (short-range dependence)")
    bad = np.nonzero(values <= 0.0)[0]
    if bad.size:
        raise ParameterError(
            f"autocovariance is non-positive at t={t[bad[0]]:.6g} ({values[bad[0]]:.3e}); "
            f"choose a window where the H_sup > 1/2 term dominates"
        )
    target = lrd_target(spec) if spec is not None else math.nan
    return _slope_report(np.log(t), np.log(values), 1.0, target, "analytic kernel")


def lrd_slope_empirical(
    paths: Union[Sequence[SamplePath], np.ndarray],
    lags: Sequence[int],
    step: float = 1.0,
    spec: Optional[MixtureSpec] = None,
) -> EstimateReport:
    """
    Decay slope of the sample autocovariance of stationary series.

    Works on mmfOU paths (or increment series) and is labeled higher-variance:
    sample autocovariances at long lags are noisy.
    """
    if isinstance(paths, np.ndarray):
        values = np.atleast_2d(paths)
    else:
        values = np.stack([_values(p) for p in paths])
    lags = np.unique(np.asarray(lags, dtype=int))
    require(lags.size >= 2, "need at least 2 lags")
    require(int(lags[-1]) < values.shape[1], "lags exceed the path length")

    centered = values - values.mean(axis=1, keepdims=True)
    width = centered.shape[1]
    acov = np.array([np.mean(centered[:, lag:] * centered[:, : width - lag]) for lag in lags])
    bad = np.nonzero(acov <= 0.0)[0]
    if bad.size:
        raise ParameterError(
            f"sample autocovariance is non-positive at lag {int(lags[bad[0]])}; "
            f"use more or longer paths"
        )
    target = lrd_target(spec) if spec is not None else math.nan
    return _slope_report(
        np.log(lags * step), np.log(acov), 1.0, target, "empirical autocovariance (higher variance)"
    )


if __name__ == "__main__":
    spec = MixtureSpec.from_pairs([(1.0, 0.25), (1.0, 0.75)])
    print(f"pvar_limit p=4: {pvar_limit(spec, 4.0, 1.0)}")
    steps = [2.0**-k for k in range(20, 26)]
    print(f"Analytic Holder estimate: {holder_estimate_analytic(spec, steps)}")
    from lib.kernels import fgn_autocov

    lrd = MixtureSpec.from_pairs([(1.0, 0.7)])
    print(f"LRD slope: {lrd_slope(lambda t: fgn_autocov(lrd, 1.0, t).value, 1e2, 1e4, 20, lrd)}")
