#!/usr/bin/env python3
"""
Acceptance suites run by ``mmfbm verify``.

The quick suite evaluates every deterministic check at full size and the
Monte Carlo checks with reduced path counts and grids; the full suite runs
the Monte Carlo checks at their acceptance sizes.
"""

import logging
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np

from lib.errors import MixtureError
from lib.estimate import (
    holder_estimate,
    lrd_slope,
    pvar_convergence_study,
    pvar_limit,
)
from lib.harness import mc_cov_test, mc_gaussianity_test, mc_stationarity_test, mc_truncation_test
from lib.kernels import (
    crossover_gap,
    fgn_autocov,
    fou_autocov,
    fou_autocov_gamma_form,
    fou_var0,
    mmfbm_cov,
    mmfou_autocov,
)
from lib.mixture import MixtureSpec, ScheduleFamily
from lib.simulate import (
    Method,
    PathGrid,
    Process,
    batch_simulator,
    reproduce_figures,
    simulate_batch,
)
from lib.spectral import cfs_integral, double_gamma_check, fourier_identity_check, spectral_autocov

logger = logging.getLogger(__name__)

TEST_SPECS: Dict[str, MixtureSpec] = {
    "H=0.3": MixtureSpec.from_pairs([(1.0, 0.3)]),
    "H=0.7": MixtureSpec.from_pairs([(1.0, 0.7)]),
    "H=0.25+0.75": MixtureSpec.from_pairs([(0.5, 0.25), (0.5, 0.75)]),
}

SUITES = ("quick", "full")

Outcome = Tuple[bool, str]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass(frozen=True)
class _Sizes:
    cov_paths: int
    cov_points: int
    pvar_max_log2: int
    pvar_seeds: int
    holder_paths: int
    holder_points: int
    trunc_points: int
    moment_paths: int


_SIZES = {
    "quick": _Sizes(10_000, 65, 12, 4, 100, 257, 65, 0),
    "full": _Sizes(10_000, 256, 16, 8, 200, 1024, 256, 20_000),
}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# Deterministic checks


def check_ou_closed_form() -> Outcome:
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        for t in (0.0, 0.5, 1.0, 5.0, 20.0):
            exact = math.exp(-lam * t) / (2.0 * lam)
            worst = max(worst, _rel(fou_autocov(lam, 0.5, t).value, exact))
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def check_variance_identity() -> Outcome:
    worst = 0.0
    for h in np.round(np.arange(0.1, 0.95, 0.1), 10):
        for lam in (0.5, 1.0, 2.0):
            exact = lam ** (-2.0 * h) * h * math.gamma(2.0 * h)
            near_zero = fou_autocov(lam, float(h), 0.0).value
            worst = max(worst, _rel(near_zero, exact), _rel(fou_var0(lam, float(h)), exact))
    return worst <= 1e-10, f"max rel err {worst:.2e}"


def check_dual_formula() -> Outcome:
    worst = 0.0
    for h in (0.5, 0.6, 0.75, 0.9):
        for x in np.geomspace(0.1, 20.0, 12):
            cosh_form = fou_autocov(1.0, h, float(x)).value
            gamma_form = fou_autocov_gamma_form(1.0, h, float(x)).value
            worst = max(worst, _rel(cosh_form, gamma_form))
    return worst <= 1e-8, f"max rel err {worst:.2e}"


def check_spectral_consistency() -> Outcome:
    worst = 0.0
    for spec in TEST_SPECS.values():
        for t in (0.0, 0.5, 1.0, 2.0):
            diff = spectral_autocov(spec, 1.0, t) - mmfou_autocov(spec, 1.0, t).value
            worst = max(worst, abs(diff))
    return worst <= 1e-6, f"max abs err {worst:.2e}"


def check_integral_identities() -> Outcome:
    worst_fourier = 0.0
    for p in (-0.8, -0.5, -0.2):
        for lam in (0.5, 1.0, 2.0):
            for t in (0.5, 1.0, 2.0):
                worst_fourier = max(worst_fourier, fourier_identity_check(p, lam, t).rel_err)
    worst_gamma = 0.0
    for alpha in (-0.4, 0.0, 1.0, 2.5):
        check = double_gamma_check(alpha)
        worst_gamma = max(worst_gamma, _rel(check.numeric, check.exact))
    passed = worst_fourier <= 1e-6 and worst_gamma <= 1e-8
    return passed, f"Fourier rel err {worst_fourier:.2e}, double-gamma rel err {worst_gamma:.2e}"


def check_crossover() -> Outcome:
    at_crossover = max(crossover_gap(1.0, h, 40.0) for h in (0.3, 0.5, 0.7, 0.9))
    at_25 = max(crossover_gap(1.0, h, 25.0) for h in (0.3, 0.5, 0.7, 0.9))
    passed = at_crossover <= 1e-8 and at_25 <= 1e-6
    return passed, f"rel gap {at_crossover:.2e} at lam*t=40, {at_25:.2e} at lam*t=25"


def check_lrd_slope() -> Outcome:
    spec = MixtureSpec.from_pairs([(1.0, 0.7)])
    fgn = lrd_slope(lambda t: fgn_autocov(spec, 1.0, t).value, 1e2, 1e4, 25, spec)
    fou = lrd_slope(lambda t: mmfou_autocov(spec, 1.0, t).value, 1e2, 1e4, 25, spec)
    passed = all(abs(r.estimate - r.target) <= 0.02 for r in (fgn, fou))
    return passed, f"fGn slope {fgn.estimate:.4f}, mmfOU slope {fou.estimate:.4f}, target -0.6"


def check_cfs() -> Outcome:
    values = []
    for spec in TEST_SPECS.values():
        for lam in (None, 1.0):
            values.append(cfs_integral(spec, lam, 2.0))
    finite = all(math.isfinite(v) for v in values)
    x0 = 2.0
    half = cfs_integral(MixtureSpec.from_pairs([(1.0, 0.5)]), None, x0)
    closed = math.log(1.0 / (2.0 * math.pi)) / x0
    err = abs(half - closed)
    return finite and err <= 1e-8, f"{len(values)} finite integrals, H=1/2 abs err {err:.2e}"


# Monte Carlo checks


def _cov_pairs(grid: PathGrid) -> List[Tuple[float, float]]:
    t = grid.times
    last = grid.n_points - 1
    indices = [
        (last // 4, last // 4),
        (last // 4, 3 * last // 4),
        (last // 2, last // 2),
        (1, last),
        (last, last),
    ]
    return [(float(t[i]), float(t[j])) for i, j in indices]


def check_simulation_law(sizes: _Sizes, seed: int) -> Outcome:
    grid = PathGrid(1.0, sizes.cov_points)
    pairs = _cov_pairs(grid)
    worst = 0.0
    for name, spec in TEST_SPECS.items():

        def mmfbm_kernel(s: float, t: float, spec=spec) -> float:
            return mmfbm_cov(spec, s, t).value

        def mmfou_kernel(s: float, t: float, spec=spec) -> float:
            return mmfou_autocov(spec, 1.0, t - s).value

        runs = [
            (Process.MMFBM, Method.CIRCULANT_SUM, None, mmfbm_kernel),
            (Process.MMFBM, Method.DENSE_EXACT, None, mmfbm_kernel),
            (Process.MMFOU, Method.DENSE_EXACT, 1.0, mmfou_kernel),
        ]
        for process, method, lam, kernel in runs:
            simulator = batch_simulator(process, spec, grid, method, lam)
            report = mc_cov_test(
                simulator, kernel, grid, pairs, sizes.cov_paths, seed,
                label=f"{process.value} {method.value} {name}",
            )
            worst = max(worst, report.max_abs_z)
            if not report.passed:
                return False, f"{report.label}: max |z| {report.max_abs_z:.2f}"

    spec = TEST_SPECS["H=0.3"]
    simulator = batch_simulator(Process.MMFBM, spec, grid, Method.CIRCULANT_SUM)
    control = mc_cov_test(
        simulator,
        lambda s, t: 1.1 * mmfbm_cov(spec, s, t).value,
        grid, pairs, sizes.cov_paths, seed, label="negative control",
    )
    if control.passed:
        return False, "negative control (analytic x 1.1) passed"
    return True, f"max |z| {worst:.2f}; negative control max |z| {control.max_abs_z:.1f}"


def check_pvariation(sizes: _Sizes, seed: int) -> Outcome:
    seeds = [seed + i for i in range(sizes.pvar_seeds)]
    n_top = 2**sizes.pvar_max_log2
    bm = MixtureSpec.from_pairs([(1.0, 0.5)])
    mixed = MixtureSpec.from_pairs([(1.0, 0.25), (1.0, 0.75)])

    bm_row = pvar_convergence_study(bm, 2.0, 1.0, [n_top], seeds)[0]
    mixed_row = pvar_convergence_study(mixed, 4.0, 1.0, [n_top], seeds)[0]
    n_list = [2**k for k in range(10, sizes.pvar_max_log2 + 1)]
    falling = pvar_convergence_study(bm, 3.0, 1.0, n_list, seeds)
    means = [r.empirical for r in falling]
    monotone = all(a > b for a, b in zip(means, means[1:]))

    bm_ok = _rel(bm_row.empirical, pvar_limit(bm, 2.0, 1.0)) <= 0.05
    mixed_ok = _rel(mixed_row.empirical, pvar_limit(mixed, 4.0, 1.0)) <= 0.10
    detail = (
        f"Bm p=2: {bm_row.empirical:.4f}; mixture p=4: {mixed_row.empirical:.4f}; "
        f"p=3 means {'decrease' if monotone else 'do not decrease'}"
    )
    return bm_ok and mixed_ok and monotone, detail


def check_holder(sizes: _Sizes, seed: int) -> Outcome:
    spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
    grid = PathGrid(1.0, sizes.holder_points)
    lags = [1, 2, 4, 8]
    estimates = []
    for process, method, lam in (
        (Process.MMFBM, Method.CIRCULANT_SUM, None),
        (Process.MMFOU, Method.DENSE_EXACT, 1.0),
    ):
        paths = simulate_batch(process, spec, grid, seed, sizes.holder_paths, method, lam)
        estimates.append(holder_estimate(paths, lags, grid.step, spec).estimate)
    passed = all(abs(e - 0.3) <= 0.05 for e in estimates)
    return passed, f"mmfBm {estimates[0]:.4f}, mmfOU {estimates[1]:.4f}, target 0.3"


def check_truncation(sizes: _Sizes, seed: int) -> Outcome:
    family = ScheduleFamily("geometric", 0.3, 0.7)
    grid = PathGrid(1.0, sizes.trunc_points)
    report = mc_truncation_test(family, 10, 20, grid, 1000, seed)
    details = report.details
    return report.passed, (
        f"mean gap {details['mean_gap']:.3e} <= bound {details['tail_bound']:.3e}; "
        f"max |z| {report.max_abs_z:.2f}"
    )


def check_figures(kinds: Tuple[str, ...]) -> Outcome:
    with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
        for kind in kinds:
            a = reproduce_figures(kind, Path(first))
            b = reproduce_figures(kind, Path(second))
            for pa, pb in zip(a, b):
                if pa.read_bytes() != pb.read_bytes():
                    return False, f"{pa.name} differs between runs"
            lines = a[0].read_text().splitlines()
            times = [float(line.split(",")[0]) for line in lines[1:]]
            expected = [j / 999 for j in range(1000)]
            if len(times) != 1000 or max(abs(x - y) for x, y in zip(times, expected)) > 1e-15:
                return False, f"{a[0].name} grid is not t_j = j/999"
    return True, f"byte-identical reruns for {', '.join(kinds)}"


def check_stationarity(sizes: _Sizes, seed: int) -> Outcome:
    spec = TEST_SPECS["H=0.25+0.75"]
    grid = PathGrid(4.0, 33)
    simulator = batch_simulator(Process.MMFOU, spec, grid, Method.DENSE_EXACT, 1.0)
    report = mc_stationarity_test(
        simulator,
        lambda t: mmfou_autocov(spec, 1.0, t).value,
        grid, [0, 1, 4], [0, 8, 16, 24], sizes.cov_paths, seed,
    )
    return report.passed, f"max |z| {report.max_abs_z:.2f}"


def check_gaussianity(sizes: _Sizes, seed: int) -> Outcome:
    spec = TEST_SPECS["H=0.25+0.75"]
    grid = PathGrid(1.0, 65)
    simulator = batch_simulator(Process.MMFBM, spec, grid, Method.CIRCULANT_SUM)
    report = mc_gaussianity_test(simulator, grid, sizes.moment_paths, seed)
    return report.passed, (
        f"max |skew| {report.max_abs_skew:.3f}, max |excess kurtosis| {report.max_abs_kurtosis:.3f}"
    )


def _checks(suite: str, seed: int) -> List[Tuple[str, Callable[[], Outcome]]]:
    sizes = _SIZES[suite]
    kinds = ("harmonic",) if suite == "quick" else ("harmonic", "factorial", "exponential")
    checks = [
        ("ou_closed_form", check_ou_closed_form),
        ("variance_identity", check_variance_identity),
        ("dual_formula", check_dual_formula),
        ("spectral_consistency", check_spectral_consistency),
        ("integral_identities", check_integral_identities),
        ("crossover_continuity", check_crossover),
        ("simulation_law", lambda: check_simulation_law(sizes, seed)),
        ("p_variation", lambda: check_pvariation(sizes, seed)),
        ("holder_index", lambda: check_holder(sizes, seed)),
        ("lrd_slope", check_lrd_slope),
        ("cfs_criterion", check_cfs),
        ("truncation_bound", lambda: check_truncation(sizes, seed)),
        ("figure_data", lambda: check_figures(kinds)),
    ]
    if sizes.moment_paths:
        checks += [
            ("stationarity", lambda: check_stationarity(sizes, seed)),
            ("gaussianity", lambda: check_gaussianity(sizes, seed)),
        ]
    return checks


def run_suite(suite: str = "quick", seed: int = 20240101) -> List[SuiteResult]:
    """
    Run an acceptance suite.

    A check that raises a toolkit error is recorded as failed with the error
    message; the remaining checks still run.

    Args:
        suite: "quick" or "full"
        seed: Master seed of the Monte Carlo checks

    Returns:
        One SuiteResult per check, in order
    """
    if suite not in _SIZES:
        raise MixtureError(f"suite={suite!r} must be one of {list(SUITES)}")
    results: List[SuiteResult] = []
    for name, check in _checks(suite, seed):
        start = time.perf_counter()
        try:
            passed, detail = check()
        except MixtureError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        logger.info("%s: %s (%.1fs)", name, "pass" if passed else "FAIL", elapsed)
        results.append(SuiteResult(name, passed, detail, elapsed))
    return results


def format_table(results: List[SuiteResult]) -> str:
    """Render results as a fixed-width pass/fail table."""
    width = max((len(r.name) for r in results), default=4)
    lines = [f"{'check':<{width}}  result  seconds  detail", "=" * (width + 40)]
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {verdict:<6}  {r.seconds:7.2f}  {r.detail}")
    passed = sum(r.passed for r in results)
    lines.append("=" * (width + 40))
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)


if __name__ == "__main__":
    print(format_table(run_suite("quick")))
