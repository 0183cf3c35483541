#!/usr/bin/env python3
"""
Exact Gaussian path generation for mmfBm and stationary mmfOU.

Methods:
  dense_exact     Cholesky factor of the full covariance (N <= dense_max_points)
  circulant_sum   per-component fractional Gaussian noise by circulant
                  embedding, cumulated, scaled by sigma_k and summed (mmfBm)
  langevin_euler  U_{j+1} = e^{-lam h} U_j + (M_{t_{j+1}} - M_{t_j}) with
                  U_0 drawn from the stationary law (mmfOU, O(h) bias)

Path i of a batch with master seed s uses seed path_seed(s, i); component k
of that path reads the Philox stream (COMPONENT, k).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as _fft
from scipy import linalg as _linalg
from scipy import signal as _signal

from lib.config import get_config
from lib.constants import SimulationDefaults
from lib.errors import EmbeddingError, FactorizationError, ParameterError, require
from lib.kernels import fgn_autocov_sequence, fou_var0, mmfbm_cov_matrix, mmfou_autocov_lags
from lib.mixture import MixtureSpec, ScheduleFamily, check_rate, ensure_valid, make_schedule
from lib.report_io import write_columns_csv, write_json
from lib.rng import DENSE, INITIAL, check_seed, component_rng, get_rng, path_seeds

logger = logging.getLogger(__name__)


class Method(str, Enum):
    DENSE_EXACT = "dense_exact"
    CIRCULANT_SUM = "circulant_sum"
    LANGEVIN_EULER = "langevin_euler"


class Process(str, Enum):
    MMFBM = "mmfbm"
    MMFOU = "mmfou"


@dataclass(frozen=True)
class SimulationSettings:
    """Numerical limits for path generation."""

    dense_max_points: int = SimulationDefaults.DENSE_MAX_POINTS
    ridge_scale: float = SimulationDefaults.RIDGE_SCALE
    ridge_retries: int = SimulationDefaults.RIDGE_RETRIES
    ridge_growth: float = SimulationDefaults.RIDGE_GROWTH
    eigen_tolerance: float = SimulationDefaults.EIGEN_TOLERANCE
    batch_size: int = SimulationDefaults.BATCH_SIZE

    @classmethod
    def from_config(cls, config) -> "SimulationSettings":
        ridge = config.ridge_settings()
        return cls(
            dense_max_points=config.dense_max_points(),
            ridge_scale=ridge["scale"],
            ridge_retries=ridge["retries"],
            ridge_growth=ridge["growth"],
            eigen_tolerance=config.eigen_tolerance(),
        )


DEFAULT_SETTINGS = SimulationSettings()


@dataclass(frozen=True)
class PathGrid:
    """Equidistant grid t_j = j T / (N - 1), j = 0..N-1."""

    horizon: float
    n_points: int

    def __post_init__(self):
        require(self.horizon > 0.0, f"horizon={self.horizon} must be positive")
        require(
            isinstance(self.n_points, (int, np.integer)) and self.n_points >= 2,
            f"n_points={self.n_points!r} must be an integer >= 2",
        )

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_points, dtype=float) * self.horizon / (self.n_points - 1)

    @property
    def step(self) -> float:
        return self.horizon / (self.n_points - 1)


@dataclass(frozen=True, eq=False)
class SamplePath:
    """One realized trajectory on a grid."""

    grid: PathGrid
    values: np.ndarray
    seed: int
    method: Method
    process: Process = Process.MMFBM
    ridge: float = 0.0
    metadata: Dict[str, float] = field(default_factory=dict)


def _method(method) -> Method:
    try:
        return Method(method)
    except ValueError as e:
        raise ParameterError(
            f"method={method!r} is not one of {[m.value for m in Method]}"
        ) from e


# Factorization and embedding


def cholesky_with_ridge(
    cov: np.ndarray, settings: SimulationSettings = DEFAULT_SETTINGS
) -> Tuple[np.ndarray, float]:
    """
    Lower Cholesky factor, retrying with ridge = scale * trace / N * growth^i.

    Returns:
        Tuple of (factor, ridge actually added)

    Raises:
        FactorizationError: If every retry fails
    """
    n = cov.shape[0]
    try:
        return np.linalg.cholesky(cov), 0.0
    except np.linalg.LinAlgError:
        pass

    ridge = settings.ridge_scale * float(np.trace(cov)) / n
    for attempt in range(settings.ridge_retries):
        logger.debug("Cholesky retry %d with ridge %.3e", attempt + 1, ridge)
        try:
            return np.linalg.cholesky(cov + ridge * np.eye(n)), ridge
        except np.linalg.LinAlgError:
            ridge *= settings.ridge_growth

    raise FactorizationError(
        f"covariance of size {n} is not positive definite after "
        f"{settings.ridge_retries} ridge retries (last ridge {ridge / settings.ridge_growth:.3e})"
    )


def circulant_eigenvalues(
    hurst: float, n_incr: int, step: float, settings: SimulationSettings = DEFAULT_SETTINGS
) -> np.ndarray:
    """
    Eigenvalues of the circulant embedding of the fGn covariance (size 2 n_incr).

    Negative eigenvalues within eigen_tolerance * max are clamped to zero.

    Raises:
        EmbeddingError: If an eigenvalue is more negative than the tolerance
    """
    gamma = fgn_autocov_sequence(hurst, n_incr, step)
    row = np.concatenate([gamma, gamma[n_incr - 1 : 0 : -1]])
    eig = _fft.fft(row).real
    floor = -settings.eigen_tolerance * float(eig.max())
    if eig.min() < floor:
        raise EmbeddingError(
            f"circulant embedding for H={hurst}, n={n_incr} has eigenvalue {eig.min():.3e} "
            f"below tolerance {floor:.3e}; use method dense_exact"
        )
    negative = eig < 0.0
    if negative.any():
        logger.debug("Clamping %d slightly negative eigenvalues for H=%s", negative.sum(), hurst)
        eig = np.where(negative, 0.0, eig)
    return eig


def _fgn_from_normals(eig: np.ndarray, normals: np.ndarray, n_incr: int) -> np.ndarray:
    # normals: (paths, 2, m) -> real part of F diag(sqrt(eig/m)) (z1 + i z2)
    m = eig.size
    weights = np.sqrt(eig / m)
    w = weights * (normals[:, 0, :] + 1j * normals[:, 1, :])
    return _fft.fft(w, axis=-1).real[:, :n_incr]


# mmfBm


def _mmfbm_circulant(
    spec: MixtureSpec, grid: PathGrid, seeds: Sequence[int], settings: SimulationSettings
) -> np.ndarray:
    n_incr = grid.n_points - 1
    m = 2 * n_incr
    values = np.zeros((len(seeds), grid.n_points))
    for k, comp in enumerate(spec):
        eig = circulant_eigenvalues(comp.hurst, n_incr, grid.step, settings)
        normals = np.stack([component_rng(s, k).standard_normal((2, m)) for s in seeds])
        noise = _fgn_from_normals(eig, normals, n_incr)
        values[:, 1:] += comp.sigma * np.cumsum(noise, axis=1)
    return values


def _mmfbm_dense(
    spec: MixtureSpec, grid: PathGrid, seeds: Sequence[int], settings: SimulationSettings
) -> Tuple[np.ndarray, float]:
    # row and column at t = 0 vanish; factor the rest
    factor, ridge = cholesky_with_ridge(mmfbm_cov_matrix(spec, grid.times[1:]), settings)
    normals = np.stack([get_rng(s, DENSE).standard_normal(grid.n_points - 1) for s in seeds])
    values = np.zeros((len(seeds), grid.n_points))
    values[:, 1:] = normals @ factor.T
    return values, ridge


def _check_dense_size(grid: PathGrid, settings: SimulationSettings) -> None:
    require(
        grid.n_points <= settings.dense_max_points,
        f"dense_exact needs n_points <= {settings.dense_max_points}, got {grid.n_points}; "
        f"use circulant_sum",
    )


def _mmfbm_block(
    spec: MixtureSpec,
    grid: PathGrid,
    seeds: Sequence[int],
    method: Method,
    settings: SimulationSettings,
) -> Tuple[np.ndarray, float]:
    if method is Method.CIRCULANT_SUM:
        return _mmfbm_circulant(spec, grid, seeds, settings), 0.0
    if method is Method.DENSE_EXACT:
        _check_dense_size(grid, settings)
        return _mmfbm_dense(spec, grid, seeds, settings)
    raise ParameterError(f"method {method.value} does not apply to mmfBm")


def simulate_mmfbm(
    spec: MixtureSpec,
    grid: PathGrid,
    seed: int,
    method=Method.CIRCULANT_SUM,
    settings: SimulationSettings = DEFAULT_SETTINGS,
) -> SamplePath:
    """
    Simulate one mmfBm path M = sum_k sigma_k B^{H_k} with M_0 = 0.

    Args:
        spec: Valid mixture
        grid: Time grid
        seed: 64-bit seed
        method: dense_exact or circulant_sum
        settings: Numerical limits

    Returns:
        SamplePath

    Raises:
        EmbeddingError: If circulant embedding fails (retry with dense_exact)
        FactorizationError: If dense factorization fails after ridge retries
    """
    ensure_valid(spec)
    seed = check_seed(seed)
    method = _method(method)
    values, ridge = _mmfbm_block(spec, grid, [seed], method, settings)
    return SamplePath(grid, values[0], seed, method, Process.MMFBM, ridge)


# mmfOU


def _mmfou_dense(
    spec: MixtureSpec,
    lam: float,
    grid: PathGrid,
    seeds: Sequence[int],
    settings: SimulationSettings,
) -> Tuple[np.ndarray, float]:
    lags = grid.times - grid.times[0]
    cov = _linalg.toeplitz(mmfou_autocov_lags(spec, lam, lags))
    factor, ridge = cholesky_with_ridge(cov, settings)
    normals = np.stack([get_rng(s, DENSE).standard_normal(grid.n_points) for s in seeds])
    return normals @ factor.T, ridge


def _mmfou_langevin(
    spec: MixtureSpec,
    lam: float,
    grid: PathGrid,
    seeds: Sequence[int],
    settings: SimulationSettings,
) -> np.ndarray:
    var0 = sum(c.sigma**2 * fou_var0(lam, c.hurst) for c in spec)
    driver = _mmfbm_circulant(spec, grid, seeds, settings)
    initial = np.array([get_rng(s, INITIAL).standard_normal() for s in seeds]) * np.sqrt(var0)
    forcing = np.empty_like(driver)
    forcing[:, 0] = initial
    forcing[:, 1:] = np.diff(driver, axis=1)
    decay = np.exp(-lam * grid.step)
    # y_j = decay * y_{j-1} + forcing_j
    return _signal.lfilter([1.0], [1.0, -decay], forcing, axis=1)


def _mmfou_block(
    spec: MixtureSpec,
    lam: float,
    grid: PathGrid,
    seeds: Sequence[int],
    method: Method,
    settings: SimulationSettings,
) -> Tuple[np.ndarray, float]:
    if method is Method.DENSE_EXACT:
        _check_dense_size(grid, settings)
        return _mmfou_dense(spec, lam, grid, seeds, settings)
    if method is Method.LANGEVIN_EULER:
        return _mmfou_langevin(spec, lam, grid, seeds, settings), 0.0
    raise ParameterError(
        f"method {method.value} does not apply to mmfOU; use dense_exact or langevin_euler"
    )


def simulate_mmfou(
    spec: MixtureSpec,
    lam: float,
    grid: PathGrid,
    seed: int,
    method=Method.DENSE_EXACT,
    settings: SimulationSettings = DEFAULT_SETTINGS,
) -> SamplePath:
    """
    Simulate one stationary mmfOU path solving dU = -lam U dt + dM.

    Args:
        spec: Valid mixture
        lam: Rate lambda > 0
        grid: Time grid
        seed: 64-bit seed
        method: dense_exact or langevin_euler
        settings: Numerical limits

    Returns:
        SamplePath starting at a stationary draw
    """
    ensure_valid(spec)
    check_rate(lam)
    seed = check_seed(seed)
    method = _method(method)
    values, ridge = _mmfou_block(spec, lam, grid, [seed], method, settings)
    return SamplePath(grid, values[0], seed, method, Process.MMFOU, ridge, {"lambda": lam})


# Batches


def simulate_batch(
    process,
    spec: MixtureSpec,
    grid: PathGrid,
    seed: int,
    n_paths: int,
    method,
    lam: Optional[float] = None,
    settings: SimulationSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """
    Simulate ``n_paths`` independent paths as an (n_paths, N) array in path order.

    Factorizations and embeddings are computed once per chunk of
    settings.batch_size paths.
    """
    process = Process(process)
    method = _method(method)
    ensure_valid(spec)
    if process is Process.MMFOU:
        check_rate(lam)
    seeds = path_seeds(seed, n_paths)

    blocks: List[np.ndarray] = []
    for start in range(0, n_paths, settings.batch_size):
        chunk = seeds[start : start + settings.batch_size]
        if process is Process.MMFBM:
            block, _ = _mmfbm_block(spec, grid, chunk, method, settings)
        else:
            block, _ = _mmfou_block(spec, lam, grid, chunk, method, settings)
        blocks.append(block)
    return np.vstack(blocks)


def batch_simulator(
    process,
    spec: MixtureSpec,
    grid: PathGrid,
    method,
    lam: Optional[float] = None,
    settings: SimulationSettings = DEFAULT_SETTINGS,
) -> Callable[[int, int], np.ndarray]:
    """Bind everything but (seed, n_paths) for the Monte Carlo harness."""

    def simulator(seed: int, n_paths: int) -> np.ndarray:
        return simulate_batch(process, spec, grid, seed, n_paths, method, lam, settings)

    return simulator


# Figure data


def reproduce_figures(
    schedule_kind: str,
    out_dir: Path,
    figure: Optional[Dict] = None,
    settings: SimulationSettings = DEFAULT_SETTINGS,
    digits: Optional[int] = None,
) -> List[Path]:
    """
    Write the sample-path data behind the mmfBm and mmfOU figures.

    Emits mmfbm_<kind>.csv and mmfou_<kind>.csv (column "t" then one column per
    seed) and figures_<kind>.json with the schedule, grid and seeds.

    Args:
        schedule_kind: harmonic, factorial or exponential
        out_dir: Output directory
        figure: Figure settings (defaults to Config.figure_settings())
        settings: Numerical limits
        digits: Significant digits (defaults to the configured value)

    Returns:
        Paths of the files written
    """
    config = get_config()
    figure = config.figure_settings() if figure is None else figure
    digits = config.significant_digits() if digits is None else digits
    require(
        schedule_kind in ("harmonic", "factorial", "exponential"),
        f"schedule_kind={schedule_kind!r} must be harmonic, factorial or exponential",
    )

    family = ScheduleFamily(schedule_kind, figure["h_lo"], figure["h_hi"], figure["n_hurst"])
    lam = figure["lambda"]
    spec = make_schedule(family, lam)
    grid = PathGrid(figure["horizon"], figure["n_points"])
    seeds = [check_seed(s) for s in figure["seeds"]]

    mmfbm_cols: Dict[str, np.ndarray] = {"t": grid.times}
    mmfou_cols: Dict[str, np.ndarray] = {"t": grid.times}
    for seed in seeds:
        mmfbm_cols[f"seed_{seed}"] = simulate_mmfbm(
            spec, grid, seed, Method.CIRCULANT_SUM, settings
        ).values
        mmfou_cols[f"seed_{seed}"] = simulate_mmfou(
            spec, lam, grid, seed, Method.DENSE_EXACT, settings
        ).values

    out_dir = Path(out_dir)
    written = [
        write_columns_csv(out_dir / f"mmfbm_{schedule_kind}.csv", mmfbm_cols, digits),
        write_columns_csv(out_dir / f"mmfou_{schedule_kind}.csv", mmfou_cols, digits),
        write_json(
            out_dir / f"figures_{schedule_kind}.json",
            {
                "schedule": schedule_kind,
                "n_points": grid.n_points,
                "horizon": grid.horizon,
                "lambda": lam,
                "components": [{"sigma": c.sigma, "hurst": c.hurst} for c in spec],
                "seeds": seeds,
                "methods": {
                    Process.MMFBM.value: Method.CIRCULANT_SUM.value,
                    Process.MMFOU.value: Method.DENSE_EXACT.value,
                },
            },
        ),
    ]
    logger.info("Figure data for %s schedule written to %s", schedule_kind, out_dir)
    return written


if __name__ == "__main__":
    spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
    grid = PathGrid(1.0, 9)
    for method in (Method.CIRCULANT_SUM, Method.DENSE_EXACT):
        path = simulate_mmfbm(spec, grid, 42, method)
        print(f"mmfBm {method.value}: {np.round(path.values, 4)}")
    path = simulate_mmfou(spec, 1.0, grid, 42)
    print(f"mmfOU dense_exact: {np.round(path.values, 4)}")
