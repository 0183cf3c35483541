#!/usr/bin/env python3
"""
Spectral densities and spectral-side consistency checks.

    f_H(x)       = sin(pi H) Gamma(1+2H) / (2 pi) |x|^{1-2H}
    f(x)         = sum_k sigma_k^2 f_{H_k}(x)
    f_{lam,H}(x) = f_H(x) / (x^2 + lam^2)

Oscillatory integrals over [1, inf) use QUADPACK's Fourier-weight routine
(QAWF), which sums the integral over successive cycles and extrapolates the
alternating series. The algebraic endpoint behaviour |x|^{1-2H} on [0, 1] uses
the algebraic-weight routine, so no integrator ever samples x = 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from lib.errors import ConvergenceError, require
from lib.kernels import fou_var0
from lib.mixture import MixtureSpec, check_hurst, check_rate, ensure_valid
from lib.special import (
    QuadratureSpec,
    gamma_fn,
    inc_gamma_pos,
    integrate,
    upper_gamma_reg,
)

logger = logging.getLogger(__name__)

SPECTRAL_QUADRATURE = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-10, max_subdivisions=200)


@dataclass(frozen=True)
class SpectralValue:
    """A spectral density value at frequency x (may be +inf at x = 0)."""

    value: float
    x: float

    def __float__(self) -> float:
        return self.value


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    rel_err: float


class DoubleGammaCheck(NamedTuple):
    numeric: float
    exact: float


def _fbm_sd_coeff(hurst: float) -> float:
    return math.sin(math.pi * hurst) * gamma_fn(1.0 + 2.0 * hurst) / (2.0 * math.pi)


def _power(x: float, exponent: float) -> float:
    """|x|^exponent with the x = 0 sentinel: +inf, 0 or 1 by the exponent's sign."""
    ax = abs(x)
    if ax == 0.0:
        if exponent < 0.0:
            return math.inf
        return 0.0 if exponent > 0.0 else 1.0
    return ax**exponent


def fbm_sd(hurst: float, x: float) -> SpectralValue:
    """Spectral density of fBm; +inf at x = 0 for H > 1/2."""
    check_hurst(hurst)
    return SpectralValue(_fbm_sd_coeff(hurst) * _power(x, 1.0 - 2.0 * hurst), x)


def mmfbm_sd(spec: MixtureSpec, x: float) -> SpectralValue:
    """f(x) = sum_k sigma_k^2 f_{H_k}(x)."""
    ensure_valid(spec)
    return SpectralValue(sum(c.sigma**2 * fbm_sd(c.hurst, x).value for c in spec), x)


def fou_sd(lam: float, hurst: float, x: float) -> SpectralValue:
    """f_{lam,H}(x) = f_H(x) / (x^2 + lam^2)."""
    check_rate(lam)
    return SpectralValue(fbm_sd(hurst, x).value / (x * x + lam * lam), x)


def mmfou_sd(spec: MixtureSpec, lam: float, x: float) -> SpectralValue:
    """f_lam(x) = f(x) / (x^2 + lam^2)."""
    check_rate(lam)
    return SpectralValue(mmfbm_sd(spec, x).value / (x * x + lam * lam), x)


def _cosine_transform(
    exponent: float, lam: float, t: float, q: QuadratureSpec
) -> float:
    """2 int_0^inf cos(t x) x^exponent / (x^2 + lam^2) dx for exponent in (-1, 1)."""
    lam2 = lam * lam
    head = integrate(
        lambda x: math.cos(t * x) / (x * x + lam2), 0.0, 1.0, q,
        weight="alg", wvar=(exponent, 0.0),
    )
    if t == 0.0:
        tail = integrate(lambda x: x**exponent / (x * x + lam2), 1.0, math.inf, q)
    else:
        tail = integrate(
            lambda x: x**exponent / (x * x + lam2), 1.0, math.inf, q,
            weight="cos", wvar=t,
        )
    return 2.0 * (head + tail)


def spectral_autocov(
    spec: MixtureSpec, lam: float, t: float, q: Optional[QuadratureSpec] = None
) -> float:
    """
    Autocovariance of the mmfOU recovered from its spectral density.

    rho_lam(t) = 2 int_0^inf cos(t x) f_lam(x) dx, evaluated independently of
    the kernels module.

    Args:
        spec: Mixture
        lam: Rate lambda > 0
        t: Lag (|t| is used)
        q: Quadrature tolerances (default SPECTRAL_QUADRATURE)
    """
    ensure_valid(spec)
    check_rate(lam)
    q = SPECTRAL_QUADRATURE if q is None else q
    t = abs(t)
    return sum(
        c.sigma**2 * _fbm_sd_coeff(c.hurst) * _cosine_transform(1.0 - 2.0 * c.hurst, lam, t, q)
        for c in spec
    )


def holder_spectral_integral(
    spec: MixtureSpec, lam: float, s: float, q: Optional[QuadratureSpec] = None
) -> float:
    """
    int_0^inf (1 - cos(s x)) f_lam(x) dx, a quarter of the stationary increment variance.
    """
    return 0.5 * (spectral_autocov(spec, lam, 0.0, q) - spectral_autocov(spec, lam, s, q))


def fourier_identity_check(
    p: float, lam: float, t: float, q: Optional[QuadratureSpec] = None
) -> IdentityCheck:
    """
    Compare int_R cos(t x)|x|^p/(lam^2 + x^2) dx with its incomplete-gamma closed form.

    rhs = pi e^{-x} / (2 cos(p pi/2) lam^{1-p}) {1 + gamma_{-p}(x) + e^{2x} Gamma_{-p}(x)}
    with x = lam t

    Args:
        p: Exponent in (-1, 0)
        lam: Rate lambda > 0
        t: Lag; both sides are even in t
        q: Quadrature tolerances

    Returns:
        IdentityCheck(lhs, rhs, rel_err)
    """
    require(-1.0 < p < 0.0, f"p={p} must lie in (-1, 0) where both sides are proper integrals")
    check_rate(lam)
    t = abs(t)
    require(t > 0.0, "t must be nonzero")
    q = SPECTRAL_QUADRATURE if q is None else q

    lhs = _cosine_transform(p, lam, t, q)
    x = lam * t
    brace = 1.0 + inc_gamma_pos(-p, x, q) + math.exp(2.0 * x) * upper_gamma_reg(-p, x)
    rhs = math.pi * math.exp(-x) / (2.0 * math.cos(p * math.pi / 2.0) * lam ** (1.0 - p)) * brace
    return IdentityCheck(lhs, rhs, abs(lhs - rhs) / abs(rhs))


def double_gamma_check(alpha: float, q: Optional[QuadratureSpec] = None) -> DoubleGammaCheck:
    """
    Numeric value of int_0^inf int_0^inf e^{-(x+y)} |x-y|^alpha dx dy against Gamma(alpha+1).

    With m = min(x, y) and v = |x - y| the double integral factors into
    2 int_0^inf e^{-2m} dm * int_0^inf e^{-v} v^alpha dv.
    """
    require(alpha > -1.0, f"alpha={alpha} must exceed -1")
    outer = integrate(lambda m: math.exp(-2.0 * m), 0.0, math.inf, q)
    inner = integrate(lambda v: math.exp(-v), 0.0, math.inf, q, singularity=alpha)
    return DoubleGammaCheck(2.0 * outer * inner, gamma_fn(alpha + 1.0))


def _cfs_constant(spec: MixtureSpec) -> float:
    # min Gamma(1+2H_k) replaces Gamma(1), which is not a lower bound when H_k < 1/2
    eps_h = min(math.sin(math.pi * spec.h_inf), math.sin(math.pi * spec.h_sup))
    g_min = min(gamma_fn(1.0 + 2.0 * c.hurst) for c in spec)
    return eps_h * g_min * spec.total_variance() / (2.0 * math.pi)


def cfs_lower_bound(spec: MixtureSpec, lam: Optional[float], x: float) -> SpectralValue:
    """
    Piecewise lower bound h(x) <= f(x) (or f_lam(x) when lam is given).

    h(x) = eps_H Gmin / (2 pi) sum_k sigma_k^2 |x|^{1-2H_inf}  for |x| <= 1
                                               |x|^{1-2H_sup}  for |x| >= 1
    with eps_H = min(sin(pi H_inf), sin(pi H_sup)) and Gmin = min_k Gamma(1+2H_k).
    """
    ensure_valid(spec)
    exponent = 1.0 - 2.0 * (spec.h_inf if abs(x) <= 1.0 else spec.h_sup)
    value = _cfs_constant(spec) * _power(x, exponent)
    if lam is not None:
        check_rate(lam)
        value /= x * x + lam * lam
    return SpectralValue(value, x)


def cfs_integral(
    spec: MixtureSpec, lam: Optional[float], x0: float, q: Optional[QuadratureSpec] = None
) -> float:
    """
    int_{x0}^inf log f(x) / x^2 dx for the mmfBm (or mmfOU) density.

    A finite value is the conditional-full-support criterion.

    Raises:
        ConvergenceError: If the density vanishes or the integral diverges
    """
    ensure_valid(spec)
    require(x0 > 1.0, f"x0={x0} must exceed 1")
    if lam is not None:
        check_rate(lam)

    def integrand(x: float) -> float:
        f = mmfbm_sd(spec, x).value
        if lam is not None:
            f /= x * x + lam * lam
        if not (f > 0.0 and math.isfinite(f)):
            raise ConvergenceError(f"log-density integral diverges: f({x}) = {f}")
        return math.log(f) / (x * x)

    return integrate(integrand, x0, math.inf, q)


def cfs_bound_integral(spec: MixtureSpec, lam: Optional[float], x0: float) -> float:
    """Closed form of int_{x0}^inf log h(x) / x^2 dx, a lower bound for cfs_integral."""
    ensure_valid(spec)
    require(x0 > 1.0, f"x0={x0} must exceed 1")
    value = math.log(_cfs_constant(spec)) / x0
    value += (1.0 - 2.0 * spec.h_sup) * (1.0 + math.log(x0)) / x0
    if lam is not None:
        check_rate(lam)
        value -= math.log(lam * lam + x0 * x0) / x0
        value -= (2.0 / lam) * (math.pi / 2.0 - math.atan(x0 / lam))
    return value


def stationary_variance(spec: MixtureSpec, lam: float) -> float:
    """sum_k sigma_k^2 lam^{-2H_k} H_k Gamma(2H_k), the target of spectral_autocov at t = 0."""
    ensure_valid(spec)
    return sum(c.sigma**2 * fou_var0(lam, c.hurst) for c in spec)


if __name__ == "__main__":
    spec = MixtureSpec.from_pairs([(1.0, 0.3), (1.0, 0.7)])
    for t in (0.0, 0.5, 1.0, 2.0):
        print(f"spectral rho({t}) = {spectral_autocov(spec, 1.0, t):.12f}")
    print(f"Fourier identity p=-0.5: {fourier_identity_check(-0.5, 1.0, 1.0)}")
    print(f"Double gamma alpha=-0.4: {double_gamma_check(-0.4)}")
    print(f"CFS integral x0=2: {cfs_integral(spec, 1.0, 2.0):.12f} "
          f">= bound {cfs_bound_integral(spec, 1.0, 2.0):.12f}")
