#!/usr/bin/env python3
"""
Covariance kernels for fBm, mmfBm, their increments, fOU and mmfOU.

The fOU autocovariance
    rho_{lam,H}(t) = Gamma(2H+1)/(2 lam^{2H})
                     * {cosh(x) - int_0^x s^{2H-1} cosh(x-s) ds / Gamma(2H)}
with x = lam*t is evaluated in one of four branches:

  * H = 1/2: e^{-x} / (2 lam) exactly
  * t = 0: the stationary variance lam^{-2H} H Gamma(2H)
  * x <= crossover: quadrature. Splitting cosh into exponentials and folding
    e^x * (1 - P(2H, x)) into the regularized upper gamma function gives
        {...} = e^{-x}/2 + e^x Q(2H, x)/2 - 1/(2 Gamma(2H)) int_0^x s^{2H-1} e^{s-x} ds
    where every term is bounded, so no e^x-sized cancellation occurs.
  * x > crossover: the large-lag expansion with N terms.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy import special as _sp

from lib.constants import KernelDefaults
from lib.errors import DomainError, require
from lib.mixture import MixtureSpec, check_hurst, check_rate, ensure_valid
from lib.special import QuadratureSpec, gamma_fn, inc_gamma_pos, integrate, upper_gamma_reg

logger = logging.getLogger(__name__)


class Branch(str, Enum):
    """Formula that produced a kernel value."""

    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    ASYMPTOTIC = "asymptotic"
    SPECIAL_CASE_H_HALF = "special_case_H_half"


# When components disagree, a sum reports its least exact branch
_BRANCH_RANK = {
    Branch.SPECIAL_CASE_H_HALF: 0,
    Branch.CLOSED_FORM: 1,
    Branch.QUADRATURE: 2,
    Branch.ASYMPTOTIC: 3,
}


@dataclass(frozen=True)
class KernelValue:
    """A covariance value with the branch that produced it."""

    value: float
    branch: Branch

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AsymptoticOrder:
    """Number of terms N >= 1 of a large-lag expansion."""

    n_terms: int = KernelDefaults.ASYMPTOTIC_TERMS

    def __post_init__(self):
        require(
            isinstance(self.n_terms, int) and self.n_terms >= 1,
            f"n_terms={self.n_terms!r} must be an integer >= 1",
        )


OrderLike = Union[int, AsymptoticOrder, None]


def _terms(order: OrderLike) -> int:
    if order is None:
        return KernelDefaults.ASYMPTOTIC_TERMS
    if isinstance(order, AsymptoticOrder):
        return order.n_terms
    return AsymptoticOrder(order).n_terms


def _combine(branches: Iterable[Branch]) -> Branch:
    return max(branches, key=_BRANCH_RANK.__getitem__)


def _check_time(value: float, name: str) -> float:
    require(value >= 0.0 and math.isfinite(value), f"{name}={value} must be a finite time >= 0")
    return float(value)


# fBm and mmfBm


def fbm_cov(hurst: float, t: float, s: float) -> KernelValue:
    """r_H(t, s) = 1/2 (t^{2H} + s^{2H} - |t - s|^{2H})."""
    check_hurst(hurst)
    _check_time(t, "t")
    _check_time(s, "s")
    a = 2.0 * hurst
    value = 0.5 * (t**a + s**a - abs(t - s) ** a)
    return KernelValue(value, Branch.CLOSED_FORM)


def mmfbm_cov(spec: MixtureSpec, t: float, s: float) -> KernelValue:
    """r(t, s) = sum_k sigma_k^2 r_{H_k}(t, s)."""
    ensure_valid(spec)
    value = sum(c.sigma**2 * fbm_cov(c.hurst, t, s).value for c in spec)
    return KernelValue(value, Branch.CLOSED_FORM)


def mmfbm_cov_matrix(spec: MixtureSpec, times: Sequence[float]) -> np.ndarray:
    """Gram matrix [r(t_i, t_j)] on a list of times."""
    ensure_valid(spec)
    t = np.asarray(times, dtype=float)
    require(bool(np.all(t >= 0.0)), "times must be nonnegative")
    ti, tj = t[:, None], t[None, :]
    gram = np.zeros((t.size, t.size))
    for c in spec:
        a = 2.0 * c.hurst
        gram += c.sigma**2 * 0.5 * (ti**a + tj**a - np.abs(ti - tj) ** a)
    return gram


def mmfbm_increment_var(spec: MixtureSpec, h: float) -> float:
    """Variogram E[(M_{t+h} - M_t)^2] = sum_k sigma_k^2 h^{2H_k}."""
    ensure_valid(spec)
    _check_time(h, "h")
    return sum(c.sigma**2 * h ** (2.0 * c.hurst) for c in spec)


def _check_increment_args(delta: float, t: float) -> None:
    require(delta > 0.0, f"delta={delta} must be positive")
    require(t >= delta, f"t={t} must be at least delta={delta}")


def fgn_autocov(spec: MixtureSpec, delta: float, t: float) -> KernelValue:
    """
    Autocovariance of delta-increments at distance t.

    rho(delta; t) = 1/2 sum_k sigma_k^2 [(t+delta)^{2H_k} + (t-delta)^{2H_k} - 2 t^{2H_k}]
    """
    ensure_valid(spec)
    _check_increment_args(delta, t)
    value = 0.0
    for c in spec:
        a = 2.0 * c.hurst
        value += 0.5 * c.sigma**2 * ((t + delta) ** a + (t - delta) ** a - 2.0 * t**a)
    return KernelValue(value, Branch.CLOSED_FORM)


def mmfbm_variogram_identity(spec: MixtureSpec, delta: float, t: float) -> float:
    """rho(delta; t) recomputed from the covariance as r(t+delta, delta) - r(t, delta)."""
    _check_increment_args(delta, t)
    return mmfbm_cov(spec, t + delta, delta).value - mmfbm_cov(spec, t, delta).value


def fgn_autocov_asymptotic(spec: MixtureSpec, delta: float, t: float) -> KernelValue:
    """Leading-order decay delta^2 sum_k sigma_k^2 H_k (2H_k - 1) t^{2H_k - 2}."""
    ensure_valid(spec)
    require(t > delta > 0.0, f"need t={t} > delta={delta} > 0")
    value = delta**2 * sum(
        c.sigma**2 * c.hurst * (2.0 * c.hurst - 1.0) * t ** (2.0 * c.hurst - 2.0) for c in spec
    )
    return KernelValue(value, Branch.ASYMPTOTIC)


def fgn_autocov_sequence(hurst: float, n_lags: int, step: float = 1.0) -> np.ndarray:
    """
    Autocovariance gamma(j), j = 0..n_lags, of unit-volatility fGn with spacing ``step``.

    gamma(j) = step^{2H}/2 (|j+1|^{2H} - 2|j|^{2H} + |j-1|^{2H})
    """
    check_hurst(hurst)
    a = 2.0 * hurst
    j = np.arange(n_lags + 1, dtype=float)
    gamma = 0.5 * (np.abs(j + 1.0) ** a - 2.0 * j**a + np.abs(j - 1.0) ** a)
    return step**a * gamma


# fOU and mmfOU


def fou_var0(lam: float, hurst: float) -> float:
    """Stationary variance lam^{-2H} H Gamma(2H)."""
    check_rate(lam)
    check_hurst(hurst)
    return lam ** (-2.0 * hurst) * hurst * gamma_fn(2.0 * hurst)


def _fou_quadrature(lam: float, hurst: float, t: float, q: Optional[QuadratureSpec]) -> float:
    x = lam * t
    a = 2.0 * hurst
    upper = 0.5 * math.exp(x) * float(_sp.gammaincc(a, x))
    lower = integrate(lambda s: math.exp(s - x), 0.0, x, q, singularity=a - 1.0)
    bracket = 0.5 * math.exp(-x) + upper - lower / (2.0 * gamma_fn(a))
    return gamma_fn(a + 1.0) / (2.0 * lam**a) * bracket


def fou_autocov_asymptotic(
    lam: float, hurst: float, t: float, order: OrderLike = None
) -> KernelValue:
    """
    Large-lag expansion 1/2 sum_{n=1}^N lam^{-2n} prod_{j=0}^{2n-1}(2H - j) t^{2H-2n}.

    Args:
        lam: Rate lambda > 0
        hurst: Hurst index
        t: Lag t > 0
        order: Number of terms N (default from KernelDefaults)
    """
    check_rate(lam)
    check_hurst(hurst)
    require(t > 0.0, f"t={t} must be positive for the large-lag expansion")
    n_terms = _terms(order)

    a = 2.0 * hurst
    total = 0.0
    coeff = 1.0
    for n in range(1, n_terms + 1):
        coeff *= (a - (2 * n - 2)) * (a - (2 * n - 1))
        total += coeff * lam ** (-2 * n) * t ** (a - 2 * n)
    return KernelValue(0.5 * total, Branch.ASYMPTOTIC)


def fou_autocov(
    lam: float,
    hurst: float,
    t: float,
    q: Optional[QuadratureSpec] = None,
    crossover: float = KernelDefaults.CROSSOVER,
    order: OrderLike = None,
) -> KernelValue:
    """
    Autocovariance rho_{lam,H}(t) of the stationary fOU process.

    Args:
        lam: Rate lambda > 0
        hurst: Hurst index
        t: Lag (negative lags use |t|)
        q: Quadrature tolerances
        crossover: lam*t above which the asymptotic expansion is used
        order: Terms of the expansion

    Returns:
        KernelValue tagged with the branch used

    Raises:
        ConvergenceError: If the quadrature branch fails
    """
    check_rate(lam)
    check_hurst(hurst)
    t = abs(t)
    require(math.isfinite(t), f"t={t} must be finite")

    if hurst == 0.5:
        return KernelValue(math.exp(-lam * t) / (2.0 * lam), Branch.SPECIAL_CASE_H_HALF)
    if t == 0.0:
        return KernelValue(fou_var0(lam, hurst), Branch.CLOSED_FORM)
    if lam * t > crossover:
        logger.debug("fOU lag %.6g beyond crossover %.6g: asymptotic branch", lam * t, crossover)
        return KernelValue(fou_autocov_asymptotic(lam, hurst, t, order).value, Branch.ASYMPTOTIC)
    return KernelValue(_fou_quadrature(lam, hurst, t, q), Branch.QUADRATURE)


def crossover_gap(
    lam: float,
    hurst: float,
    t: float,
    q: Optional[QuadratureSpec] = None,
    order: OrderLike = None,
) -> float:
    """
    Relative disagreement of the quadrature and asymptotic branches of fou_autocov at t.

    Both evaluations go through fou_autocov, so H = 1/2 compares the exact
    special case with itself.
    """
    near = fou_autocov(lam, hurst, t, q, crossover=math.inf, order=order).value
    far = fou_autocov(lam, hurst, t, q, crossover=0.0, order=order).value
    return abs(near - far) / abs(near)


def fou_autocov_gamma_form(
    lam: float, hurst: float, t: float, q: Optional[QuadratureSpec] = None
) -> KernelValue:
    """
    Incomplete-gamma form of rho_{lam,H}(t), valid for H >= 1/2 only.

    Gamma(1+2H)/4 * e^{-x}/lam^{2H} * {1 + gamma_{2H-1}(x) + e^{2x} Gamma_{2H-1}(x)}

    Raises:
        DomainError: If H < 1/2 (the lower integral diverges)
    """
    check_rate(lam)
    check_hurst(hurst)
    require(
        hurst >= 0.5,
        f"fou_autocov_gamma_form: H={hurst} < 1/2 makes gamma_(2H-1) diverge",
        DomainError,
    )
    _check_time(t, "t")
    x = lam * t
    alpha = 2.0 * hurst - 1.0
    if alpha == 0.0:
        lower, upper = 1.0, 0.0
    else:
        lower, upper = inc_gamma_pos(alpha, x, q), upper_gamma_reg(alpha, x)
    brace = 1.0 + lower + math.exp(2.0 * x) * upper
    value = gamma_fn(1.0 + 2.0 * hurst) / 4.0 * math.exp(-x) / lam ** (2.0 * hurst) * brace
    return KernelValue(value, Branch.CLOSED_FORM)


def mmfou_autocov(
    spec: MixtureSpec,
    lam: float,
    t: float,
    q: Optional[QuadratureSpec] = None,
    crossover: float = KernelDefaults.CROSSOVER,
    order: OrderLike = None,
) -> KernelValue:
    """rho_lam(t) = sum_k sigma_k^2 rho_{lam,H_k}(t)."""
    ensure_valid(spec)
    parts = [fou_autocov(lam, c.hurst, t, q, crossover, order) for c in spec]
    value = sum(c.sigma**2 * p.value for c, p in zip(spec, parts))
    return KernelValue(value, _combine(p.branch for p in parts))


def mmfou_autocov_asymptotic(
    spec: MixtureSpec, lam: float, t: float, order: OrderLike = None
) -> KernelValue:
    """Component-wise sum of fou_autocov_asymptotic."""
    ensure_valid(spec)
    value = sum(c.sigma**2 * fou_autocov_asymptotic(lam, c.hurst, t, order).value for c in spec)
    return KernelValue(value, Branch.ASYMPTOTIC)


def mmfou_autocov_lags(
    spec: MixtureSpec,
    lam: float,
    lags: Sequence[float],
    q: Optional[QuadratureSpec] = None,
    crossover: float = KernelDefaults.CROSSOVER,
) -> np.ndarray:
    """Evaluate mmfou_autocov at each lag."""
    return np.array([mmfou_autocov(spec, lam, float(t), q, crossover).value for t in lags])


def _fou_increment_small_lag(
    lam: float, hurst: float, h: float, q: Optional[QuadratureSpec]
) -> float:
    # 2(rho(0) - rho(h)) = Gamma(2H+1)/lam^{2H} {I/Gamma(2H) - 2 sinh^2(x/2)}
    x = lam * h
    a = 2.0 * hurst
    inner = integrate(lambda s: math.cosh(x - s), 0.0, x, q, singularity=a - 1.0)
    brace = inner / gamma_fn(a) - 2.0 * math.sinh(0.5 * x) ** 2
    return gamma_fn(a + 1.0) / lam**a * brace


def mmfou_increment_var(
    spec: MixtureSpec,
    lam: float,
    h: float,
    q: Optional[QuadratureSpec] = None,
    crossover: float = KernelDefaults.CROSSOVER,
) -> float:
    """
    Stationary increment variance E[(U_{t+h} - U_t)^2] = 2(rho_lam(0) - rho_lam(h)).

    For lam*h below KernelDefaults.SMALL_LAG the difference is evaluated directly,
    without subtracting two nearly equal covariances.
    """
    ensure_valid(spec)
    check_rate(lam)
    h = abs(h)
    if h == 0.0:
        return 0.0
    total = 0.0
    for c in spec:
        if lam * h <= KernelDefaults.SMALL_LAG:
            part = _fou_increment_small_lag(lam, c.hurst, h, q)
        else:
            part = 2.0 * (
                fou_var0(lam, c.hurst) - fou_autocov(lam, c.hurst, h, q, crossover).value
            )
        total += c.sigma**2 * part
    return total


if __name__ == "__main__":
    spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
    print(f"r(1, 1) = {mmfbm_cov(spec, 1.0, 1.0).value}")
    for t in (0.0, 1.0, 10.0, 39.0, 41.0, 100.0):
        kv = mmfou_autocov(spec, 1.0, t)
        print(f"rho(t={t:6.1f}) = {kv.value:.15e}  [{kv.branch.value}]")
    for t in (1.0, 2.0):
        print(f"H=0.75 t={t}: cosh form {fou_autocov(1.0, 0.75, t).value:.15e}, "
              f"gamma form {fou_autocov_gamma_form(1.0, 0.75, t).value:.15e}")
