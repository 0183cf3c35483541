#!/usr/bin/env python3
"""
Gamma-function machinery and adaptive quadrature.

Complete and regularized incomplete gamma functions come from scipy.special.
The normalized positive-exponent integral
    gamma_alpha(x) = 1/Gamma(alpha) * int_0^x s^(alpha-1) e^s ds
has no library counterpart and is evaluated by quadrature with the
endpoint singularity removed by substitution. All integrals go through
``integrate``, a thin QUADPACK wrapper that raises ConvergenceError instead
of emitting warnings.
"""

import logging
import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

from scipy import integrate as _quadpack
from scipy import special as _sp

from lib.constants import Tolerances
from lib.errors import ConvergenceError, DomainError, ParameterError, require

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature."""

    abs_tol: float = Tolerances.ABS_TOL
    rel_tol: float = Tolerances.REL_TOL
    max_subdivisions: int = Tolerances.MAX_SUBDIVISIONS

    def __post_init__(self):
        require(self.abs_tol > 0.0, f"abs_tol={self.abs_tol} must be positive")
        require(self.rel_tol > 0.0, f"rel_tol={self.rel_tol} must be positive")
        require(
            isinstance(self.max_subdivisions, int) and self.max_subdivisions >= 1,
            f"max_subdivisions={self.max_subdivisions!r} must be a positive integer",
        )

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_QUADRATURE = QuadratureSpec()

# e^x overflows a double beyond log(sys.float_info.max) ~ 709.78
_LOG_FLOAT_MAX = math.log(sys.float_info.max)
_EXP_SAFE = 700.0


def _resolve(q: Optional[QuadratureSpec]) -> QuadratureSpec:
    return DEFAULT_QUADRATURE if q is None else q


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    q: Optional[QuadratureSpec] = None,
    singularity: Optional[float] = None,
    weight: Optional[str] = None,
    wvar: Union[None, float, Tuple[float, float]] = None,
    points: Optional[Sequence[float]] = None,
) -> float:
    """
    Integrate f over [a, b] (b may be +inf) with QUADPACK.

    With ``singularity=beta`` the integrand is (s - a)^beta * f(s); for
    beta < 0 the substitution s = a + u^(1/(1+beta)) turns it into the smooth
    integrand f(a + u^(1/(1+beta))) / (1 + beta).

    Args:
        f: Integrand (or its regular factor when a singularity is declared)
        a: Lower limit
        b: Upper limit, possibly math.inf
        q: Tolerances
        singularity: Exponent beta > -1 of a left-endpoint factor (s - a)^beta
        weight: QUADPACK weight name passed through ('alg', 'cos', ...)
        wvar: Weight parameters
        points: Interior break points (finite intervals only)

    Returns:
        Integral value

    Raises:
        ConvergenceError: If the tolerance is not met within max_subdivisions
    """
    q = _resolve(q)
    if a == b:
        return 0.0

    lo, hi, func = a, b, f
    if singularity is not None:
        beta = float(singularity)
        require(beta > -1.0, f"singularity exponent {beta} must exceed -1", DomainError)
        require(weight is None, "a declared singularity cannot be combined with a weight")
        if beta < 0.0:
            power = 1.0 / (1.0 + beta)
            lo = 0.0
            hi = math.inf if math.isinf(b) else (b - a) ** (1.0 + beta)

            def func(u, _g=f, _a=a, _p=power):
                try:
                    s = _a + u**_p
                except OverflowError:
                    s = math.inf
                return _p * _g(s)

        elif beta > 0.0:

            def func(s, _g=f, _a=a, _b=beta):
                return (s - _a) ** _b * _g(s)

    kwargs = {
        "epsabs": q.abs_tol,
        "epsrel": q.rel_tol,
        "limit": q.max_subdivisions,
        "full_output": 1,
    }
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
    if points is not None:
        kwargs["points"] = points

    result = _quadpack.quad(func, lo, hi, **kwargs)
    value, abserr = float(result[0]), float(result[1])

    # QUADPACK appends a message only when ier != 0
    if len(result) > 3 and abserr > q.tolerance_for(value):
        raise ConvergenceError(
            f"quadrature on [{a}, {b}] did not converge: {result[3]}",
            estimate=value,
            error_bound=abserr,
        )
    if not math.isfinite(value):
        raise ConvergenceError(f"quadrature on [{a}, {b}] produced {value}", estimate=value)
    return value


def gamma_fn(alpha: float) -> float:
    """
    Complete gamma function for alpha > 0.

    Raises:
        DomainError: If alpha <= 0
    """
    require(alpha > 0.0, f"gamma_fn: alpha={alpha} must be positive", DomainError)
    return float(_sp.gamma(alpha))


def _check_alpha(alpha: float, name: str) -> None:
    require(
        0.0 < alpha < 1.0,
        f"{name}: alpha={alpha} must lie in (0, 1); the range (-1, 0) is not supported",
        DomainError,
    )


def inc_gamma_pos(alpha: float, x: float, q: Optional[QuadratureSpec] = None) -> float:
    """
    Normalized positive-exponent incomplete integral.

    gamma_alpha(x) = 1/Gamma(alpha) * int_0^x s^(alpha-1) e^s ds

    Args:
        alpha: Exponent in (0, 1)
        x: Upper limit, x >= 0
        q: Quadrature tolerances

    Returns:
        Nonnegative value, increasing in x; inf once it leaves the double range
    """
    _check_alpha(alpha, "inc_gamma_pos")
    require(x >= 0.0, f"inc_gamma_pos: x={x} must be nonnegative", DomainError)
    if x == 0.0:
        return 0.0
    if x > _EXP_SAFE:
        return _inc_gamma_pos_large(alpha, x, q)
    total = integrate(math.exp, 0.0, x, q, singularity=alpha - 1.0)
    return total / gamma_fn(alpha)


def _inc_gamma_pos_large(alpha: float, x: float, q: Optional[QuadratureSpec]) -> float:
    # e^x * int_0^x (x - u)^(alpha-1) e^-u du; u > 60 adds less than e^-60 relative
    scaled = integrate(lambda u: (x - u) ** (alpha - 1.0) * math.exp(-u), 0.0, 60.0, q)
    log_value = x + math.log(scaled) - math.lgamma(alpha)
    if log_value >= _LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_value)


def inc_gamma_pos_series(
    alpha: float, x: float, accuracy: float = 1.0e-15, max_iteration: int = 500
) -> float:
    """
    Term-by-term series for gamma_alpha(x).

    gamma_alpha(x) = 1/Gamma(alpha) * sum_n x^(n+alpha) / ((n+alpha) n!)
    """
    _check_alpha(alpha, "inc_gamma_pos_series")
    require(x >= 0.0, f"inc_gamma_pos_series: x={x} must be nonnegative", DomainError)
    if x == 0.0:
        return 0.0

    term = 1.0  # x^n / n!
    total = 1.0 / alpha
    for n in range(1, max_iteration + 1):
        term *= x / n
        delta = term / (n + alpha)
        total += delta
        if delta < total * accuracy:
            return total * x**alpha / gamma_fn(alpha)

    raise ConvergenceError(
        f"series for gamma_{alpha}({x}) did not reach accuracy {accuracy}",
        estimate=total * x**alpha / gamma_fn(alpha),
    )


def upper_gamma_reg(alpha: float, x: float) -> float:
    """
    Regularized upper incomplete gamma Gamma_alpha(x) for alpha in (0, 1).

    Returns 1 at x = 0 and 0 at x = inf.
    """
    _check_alpha(alpha, "upper_gamma_reg")
    require(x >= 0.0, f"upper_gamma_reg: x={x} must be nonnegative", DomainError)
    return float(_sp.gammaincc(alpha, x))


def abs_moment(p: float) -> float:
    """
    Absolute Gaussian moment mu_p = E|Z|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi).

    Raises:
        ParameterError: If p < 0
    """
    require(p >= 0.0, f"abs_moment: p={p} must be nonnegative", ParameterError)
    return float(2.0 ** (p / 2.0) * _sp.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi))


if __name__ == "__main__":
    print(f"Gamma(1.4) = {gamma_fn(1.4):.15f}")
    print(f"gamma_0.5(1) quadrature = {inc_gamma_pos(0.5, 1.0):.15f}")
    print(f"gamma_0.5(1) series     = {inc_gamma_pos_series(0.5, 1.0):.15f}")
    print(f"Gamma_0.9(1) = {upper_gamma_reg(0.9, 1.0):.15f}")
    print(f"mu_1 = {abs_moment(1.0):.15f}")
    root_pi = integrate(lambda s: math.exp(-s), 0.0, math.inf, singularity=-0.5)
    print(f"int_0^inf e^-s s^-1/2 ds = {root_pi:.15f}")
