#!/usr/bin/env python3
"""
Mixture parameters for multi-mixed fractional processes.

A mixture is an ordered list of (sigma_k, H_k) components plus an optional
mean-reversion rate lambda. This module validates mixtures against the
standing assumptions (positive volatilities with summable squares, Hurst
indices pairwise distinct inside (0, 1)), builds the parametric volatility
schedules used for sample-path figures, and truncates infinite schedules
with the L2 tail bound max{1, T^3} * sum_{k>K} sigma_k^2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from lib.config import get_config
from lib.errors import ParameterError, require

logger = logging.getLogger(__name__)


def check_hurst(hurst: float, name: str = "H") -> float:
    """
    Validate a Hurst index.

    Raises:
        ParameterError: If the value is not in the open interval (0, 1)
    """
    require(
        isinstance(hurst, (int, float)) and 0.0 < hurst < 1.0,
        f"{name}={hurst!r} must lie in (0, 1) (Hurst index)",
    )
    return float(hurst)


def check_rate(lam: Optional[float], name: str = "lambda") -> float:
    """Validate a mean-reversion rate lambda > 0."""
    require(
        lam is not None and math.isfinite(lam) and lam > 0.0,
        f"{name}={lam!r} must be a positive finite rate",
    )
    return float(lam)


@dataclass(frozen=True)
class Component:
    """One (sigma, H) pair of a mixture."""

    sigma: float
    hurst: float


@dataclass(frozen=True)
class ValidationReport:
    """Result of validate_spec: ok flag plus the violated assumptions."""

    ok: bool
    violations: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class MixtureSpec:
    """
    Model parameters {(sigma_k, H_k)} with an optional rate lambda.

    Construction never validates; call validate_spec or ensure_valid.
    """

    components: Tuple[Component, ...]
    lam: Optional[float] = None

    @classmethod
    def from_pairs(
        cls, pairs: Sequence[Tuple[float, float]], lam: Optional[float] = None
    ) -> "MixtureSpec":
        """Build a spec from (sigma, hurst) pairs."""
        return cls(tuple(Component(float(s), float(h)) for s, h in pairs), lam)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def sigmas(self) -> Tuple[float, ...]:
        return tuple(c.sigma for c in self.components)

    @property
    def hursts(self) -> Tuple[float, ...]:
        return tuple(c.hurst for c in self.components)

    @property
    def h_inf(self) -> float:
        return min(self.hursts)

    @property
    def h_sup(self) -> float:
        return max(self.hursts)

    def total_variance(self) -> float:
        """Sum of sigma_k^2, the variance of M at t = 1."""
        return sum(c.sigma**2 for c in self.components)

    def with_lambda(self, lam: Optional[float]) -> "MixtureSpec":
        return MixtureSpec(self.components, lam)


def validate_spec(spec: MixtureSpec) -> ValidationReport:
    """
    Check a mixture against the standing assumptions.

    Never raises; every violated assumption is listed.

    Args:
        spec: Mixture to check

    Returns:
        ValidationReport with ok=True iff no assumption is violated
    """
    violations: List[str] = []

    if len(spec.components) == 0:
        violations.append("empty mixture: at least one component is required")

    for k, comp in enumerate(spec.components):
        if not (isinstance(comp.sigma, (int, float)) and math.isfinite(comp.sigma)):
            violations.append(f"ass1: sigma[{k}]={comp.sigma!r} must be a finite number")
        elif comp.sigma <= 0.0:
            violations.append(f"ass1: sigma[{k}]={comp.sigma!r} must be positive")
        if not (isinstance(comp.hurst, (int, float)) and 0.0 < comp.hurst < 1.0):
            violations.append(f"ass2: hurst[{k}]={comp.hurst!r} lies outside (0, 1)")

    # Exact comparison: distinctness is structural
    first_seen: Dict[float, int] = {}
    for k, comp in enumerate(spec.components):
        if not isinstance(comp.hurst, (int, float)):
            continue
        if comp.hurst in first_seen:
            violations.append(
                f"ass2: duplicate Hurst index {comp.hurst!r} at components "
                f"{first_seen[comp.hurst]} and {k} (H_k must differ for k != l)"
            )
        else:
            first_seen[comp.hurst] = k

    lam_ok = isinstance(spec.lam, (int, float)) and not isinstance(spec.lam, bool)
    if spec.lam is not None and not (lam_ok and math.isfinite(spec.lam) and spec.lam > 0.0):
        violations.append(f"lambda={spec.lam!r} must be a positive finite rate")

    return ValidationReport(ok=not violations, violations=tuple(violations))


def ensure_valid(spec: MixtureSpec, need_lambda: bool = False) -> MixtureSpec:
    """
    Raise ParameterError naming the first violated assumption.

    Args:
        spec: Mixture to check
        need_lambda: Also require spec.lam to be present
    """
    report = validate_spec(spec)
    if not report.ok:
        raise ParameterError("; ".join(report.violations))
    if need_lambda:
        check_rate(spec.lam)
    return spec


# Schedules


def _harmonic_sigma(i: int) -> float:
    return 1.0 / i


def _factorial_sigma(i: int) -> float:
    return math.exp(-math.lgamma(i + 1))


def _exponential_sigma(i: int) -> float:
    return math.exp(-i)


def _geometric_sigma(i: int) -> float:
    return 2.0**-i


def _harmonic_tail(k: int) -> float:
    # sum_{j>K} 1/j^2 <= 1/K
    return 1.0 / k


def _factorial_tail(k: int) -> float:
    # sum_{j>K} 1/(j!)^2 <= ((K+1)!)^-2 / (1 - (K+2)^-2)
    lead = math.exp(-2.0 * math.lgamma(k + 2))
    return lead / (1.0 - (k + 2) ** -2)


def _exponential_tail(k: int) -> float:
    return math.exp(-2.0 * (k + 1)) / (1.0 - math.exp(-2.0))


def _geometric_tail(k: int) -> float:
    return 4.0**-k / 3.0


@dataclass(frozen=True)
class _Family:
    sigma: Callable[[int], float]
    tail: Callable[[int], float]


SCHEDULE_KINDS: Dict[str, _Family] = {
    "harmonic": _Family(_harmonic_sigma, _harmonic_tail),
    "factorial": _Family(_factorial_sigma, _factorial_tail),
    "exponential": _Family(_exponential_sigma, _exponential_tail),
    "geometric": _Family(_geometric_sigma, _geometric_tail),
}


@dataclass(frozen=True)
class ScheduleFamily:
    """
    Parametric volatility schedule with a Hurst range.

    Attributes:
        kind: harmonic (1/i), factorial (1/i!), exponential (e^-i) or geometric (2^-i)
        h_lo: Smallest Hurst index
        h_hi: Largest Hurst index
        count: Number of components of the finite schedule
    """

    kind: str
    h_lo: float
    h_hi: float
    count: int = 1

    def family(self) -> _Family:
        require(
            self.kind in SCHEDULE_KINDS,
            f"schedule kind={self.kind!r} has no closed-form tail; "
            f"expected one of {sorted(SCHEDULE_KINDS)}",
        )
        return SCHEDULE_KINDS[self.kind]

    def check_range(self) -> None:
        check_hurst(self.h_lo, "h_lo")
        check_hurst(self.h_hi, "h_hi")
        require(self.h_lo <= self.h_hi, f"h_lo={self.h_lo} must not exceed h_hi={self.h_hi}")

    def infinite_hurst(self, k: int) -> float:
        """Hurst index of component k (1-based) of the infinite schedule."""
        return self.h_hi - (self.h_hi - self.h_lo) / k


@dataclass(frozen=True)
class TruncationReport:
    """Outcome of truncate_schedule."""

    retained: int
    tail_bound: float
    horizon: float
    eps: float
    kind: str = field(default="")


def make_schedule(family: ScheduleFamily, lam: Optional[float] = None) -> MixtureSpec:
    """
    Build the finite mixture of a schedule family.

    The i-th component has sigma_i from the family formula and
    H_i = h_lo + (i - 1)(h_hi - h_lo)/(count - 1).

    Args:
        family: Schedule description
        lam: Optional rate attached to the result

    Returns:
        MixtureSpec with ``count`` components

    Raises:
        ParameterError: On an invalid range, count or kind
    """
    fam = family.family()
    family.check_range()
    require(
        isinstance(family.count, int) and family.count >= 1,
        f"count={family.count!r} must be a positive integer",
    )
    require(
        family.count == 1 or family.h_lo < family.h_hi,
        f"h_lo == h_hi == {family.h_lo} with count={family.count} gives duplicate Hurst indices",
    )

    n = family.count
    pairs = []
    for i in range(1, n + 1):
        if n == 1:
            hurst = family.h_lo
        elif i == n:
            hurst = family.h_hi
        else:
            hurst = family.h_lo + (i - 1) * (family.h_hi - family.h_lo) / (n - 1)
        pairs.append((fam.sigma(i), hurst))

    return MixtureSpec.from_pairs(pairs, lam)


def _smallest_retained(tail: Callable[[int], float], scale: float, eps: float) -> int:
    """Smallest K >= 1 with scale * tail(K) <= eps for a nonincreasing tail."""
    if scale * tail(1) <= eps:
        return 1

    lo, hi = 1, 2
    while scale * tail(hi) > eps:
        lo, hi = hi, hi * 2
        require(hi < 2**62, f"eps={eps} is not reachable for this schedule")

    # invariant: tail(lo) too large, tail(hi) small enough
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if scale * tail(mid) > eps:
            lo = mid
        else:
            hi = mid
    return hi


def truncate_schedule(
    family: ScheduleFamily,
    eps: float,
    horizon: float,
    lam: Optional[float] = None,
    max_components: Optional[int] = None,
) -> Tuple[MixtureSpec, TruncationReport]:
    """
    Truncate an infinite schedule so that its L2(Omega x [0, T]) error is at most eps.

    The family's ``count`` is ignored; component k of the infinite schedule has
    Hurst index h_hi - (h_hi - h_lo)/k.

    Args:
        family: Schedule (treated as infinite)
        eps: Target bound on max{1, T^3} * sum_{k>K} sigma_k^2
        horizon: Time horizon T
        lam: Optional rate attached to the result
        max_components: Largest K accepted (default: truncation.max_components)

    Returns:
        Tuple of (retained mixture, TruncationReport)

    Raises:
        ParameterError: If eps needs more than max_components components
    """
    fam = family.family()
    family.check_range()
    require(eps > 0.0 and math.isfinite(eps), f"eps={eps!r} must be positive")
    require(horizon > 0.0 and math.isfinite(horizon), f"horizon={horizon!r} must be positive")

    scale = max(1.0, horizon**3)
    retained = _smallest_retained(fam.tail, scale, eps)
    if max_components is None:
        max_components = get_config().max_components()
    require(
        retained <= max_components,
        f"eps={eps} needs K={retained} components of the {family.kind} schedule; "
        f"truncation.max_components={max_components}",
    )
    require(
        retained == 1 or family.h_lo < family.h_hi,
        f"h_lo == h_hi == {family.h_lo} cannot give {retained} distinct Hurst indices",
    )

    spec = truncated_spec(family, retained, lam)
    ensure_valid(spec)
    report = TruncationReport(
        retained=retained,
        tail_bound=scale * fam.tail(retained),
        horizon=float(horizon),
        eps=float(eps),
        kind=family.kind,
    )
    logger.debug(
        "Truncated %s schedule at K=%d (tail bound %.3e)", family.kind, retained, report.tail_bound
    )
    return spec, report


def truncated_spec(
    family: ScheduleFamily, retained: int, lam: Optional[float] = None
) -> MixtureSpec:
    """First ``retained`` components of the infinite schedule."""
    fam = family.family()
    family.check_range()
    require(
        isinstance(retained, int) and retained >= 1,
        f"retained={retained!r} must be a positive integer",
    )
    pairs = [(fam.sigma(k), family.infinite_hurst(k)) for k in range(1, retained + 1)]
    return MixtureSpec.from_pairs(pairs, lam)


def truncation_gap(family: ScheduleFamily, k_lo: int, k_hi: int, horizon: float) -> float:
    """
    Exact squared L2(Omega x [0, T]) distance between two nested truncations.

    Equals sum_{k_lo < k <= k_hi} sigma_k^2 T^{1+2H_k} / (1 + 2H_k).
    """
    fam = family.family()
    require(1 <= k_lo <= k_hi, f"need 1 <= k_lo={k_lo} <= k_hi={k_hi}")
    total = 0.0
    for k in range(k_lo + 1, k_hi + 1):
        h = family.infinite_hurst(k)
        total += fam.sigma(k) ** 2 * horizon ** (1.0 + 2.0 * h) / (1.0 + 2.0 * h)
    return total


# JSON documents


def load_spec(document: Dict[str, Any]) -> MixtureSpec:
    """
    Parse a spec document {"components": [{"sigma": .., "hurst": ..}], "lambda": ..}.

    Raises:
        ParameterError: If the document is malformed
    """
    require(isinstance(document, dict), "spec document must be a JSON object")
    comps = document.get("components")
    require(isinstance(comps, list), "spec document needs a 'components' list")
    pairs = []
    for k, item in enumerate(comps):
        require(
            isinstance(item, dict) and "sigma" in item and "hurst" in item,
            f"components[{k}] must have 'sigma' and 'hurst'",
        )
        try:
            pairs.append((float(item["sigma"]), float(item["hurst"])))
        except (TypeError, ValueError) as e:
            raise ParameterError(f"components[{k}] has a non-numeric value: {e}") from e
    lam = document.get("lambda")
    if lam is not None:
        try:
            lam = float(lam)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"lambda={lam!r} is not a number") from e
    return MixtureSpec.from_pairs(pairs, lam)


def spec_to_document(spec: MixtureSpec) -> Dict[str, Any]:
    """Inverse of load_spec."""
    doc: Dict[str, Any] = {
        "components": [{"sigma": c.sigma, "hurst": c.hurst} for c in spec.components]
    }
    if spec.lam is not None:
        doc["lambda"] = spec.lam
    return doc


def load_schedule(document: Dict[str, Any]) -> ScheduleFamily:
    """Parse a schedule document {"kind", "h_lo", "h_hi", "count"}."""
    require(isinstance(document, dict), "schedule document must be a JSON object")
    for key in ("kind", "h_lo", "h_hi"):
        require(key in document, f"schedule document needs '{key}'")
    try:
        return ScheduleFamily(
            kind=str(document["kind"]),
            h_lo=float(document["h_lo"]),
            h_hi=float(document["h_hi"]),
            count=int(document.get("count", 1)),
        )
    except (TypeError, ValueError) as e:
        raise ParameterError(f"schedule document has a malformed value: {e}") from e


if __name__ == "__main__":
    spec = make_schedule(ScheduleFamily("harmonic", 0.1, 0.9, 10))
    print("Harmonic schedule:")
    for comp in spec:
        print(f"  sigma={comp.sigma:.4f}  H={comp.hurst:.4f}")
    print(f"Validation: {validate_spec(spec)}")
    _, report = truncate_schedule(ScheduleFamily("geometric", 0.3, 0.7), 1e-6, 1.0)
    print(f"Geometric truncation: {report}")
