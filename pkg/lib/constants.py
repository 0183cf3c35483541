#!/usr/bin/env python3
"""
Constants and default numerical settings for mmfbm-toolkit.
Centralizes tolerances, crossovers and simulation limits; config/defaults.json
overrides them at run time.
"""


class Tolerances:
    """Quadrature tolerances used by every kernel and spectral integral."""

    ABS_TOL = 1e-13
    REL_TOL = 1e-12
    MAX_SUBDIVISIONS = 200

    # Oscillatory (Fourier) integrals ignore the relative tolerance
    FOURIER_ABS_TOL = 1e-11


class KernelDefaults:
    """Branch selection for the fOU autocovariance."""

    CROSSOVER = 40.0  # lambda * t above which the asymptotic expansion is used
    ASYMPTOTIC_TERMS = 5
    SMALL_LAG = 1.0  # lambda * h below which increment variances use the small-lag form


class TruncationDefaults:
    """Limits on truncated infinite schedules."""

    MAX_COMPONENTS = 1_000_000


class SimulationDefaults:
    """Limits and robustness settings for path generation."""

    DENSE_MAX_POINTS = 4096
    RIDGE_SCALE = 1e-12  # ridge = RIDGE_SCALE * trace / N
    RIDGE_RETRIES = 3
    RIDGE_GROWTH = 10.0
    EIGEN_TOLERANCE = 1e-10  # relative to the largest circulant eigenvalue
    BATCH_SIZE = 2048


class HarnessDefaults:
    """Monte Carlo acceptance thresholds."""

    Z_MAX = 4.0
    MIN_PATHS = 1000
    SKEW_MAX = 0.1
    KURTOSIS_MAX = 0.2


class FigureDefaults:
    """Sample-path parameters for the figure data."""

    N_POINTS = 1000
    N_HURST = 10
    H_LO = 0.1
    H_HI = 0.9
    LAMBDA = 1.0
    HORIZON = 1.0
    SEEDS = [20240101, 20240102, 20240103]


class ExitCodes:
    """Process exit codes of the command-line front end."""

    OK = 0
    VALIDATION = 1
    CONVERGENCE = 2
    IO = 3


class Defaults:
    """Miscellaneous defaults."""

    SIGNIFICANT_DIGITS = 17
    SEED = 12345
    CONFIG_KEY = "mmfbm_toolkit"
