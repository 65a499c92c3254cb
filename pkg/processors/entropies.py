"""
Cumulative Information Measures

Direct quadrature of the four defining integrals

    CRE  = -integral F̄ log F̄ dx        CE  = -integral F log F dx
    WCRE = -integral x F̄ log F̄ dx      WCE = -integral x F log F dx

over a non-negative support. Finite supports use QAGS directly; infinite
supports substitute x = Q(p) when the law has a closed-form quantile and a
density, otherwise (or when that route fails) QUADPACK's mapped rule.
Empirical laws are evaluated exactly as gap sums over the sorted sample.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Tuple

import numpy as np

from config.settings import Config
from core.distributions import DistributionSpec, cdf, pdf, quantile, sf
from core.exceptions import CapabilityError, EntropyToolkitError, IntegrationError
from core.quadrature import (
    DEFAULT_TOLERANCE,
    IntegralResult,
    Tolerance,
    check_boundary_products,
    integrate,
    integrate_quantile,
    xlogx,
)
from utils.logging_config import get_logger

logger = get_logger("processors.entropies")


class EntropyKind(Enum):
    CRE = "cre"
    CE = "ce"
    WCRE = "wcre"
    WCE = "wce"

    @property
    def residual(self) -> bool:
        """Integrand built on F̄ (CRE, WCRE) rather than F."""
        return self in (EntropyKind.CRE, EntropyKind.WCRE)

    @property
    def weighted(self) -> bool:
        return self in (EntropyKind.WCRE, EntropyKind.WCE)

    @classmethod
    def parse(cls, name: str) -> "EntropyKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown measure '{name}' (expected one of cre, ce, wcre, wce)") from None


@dataclass(frozen=True)
class EntropyValue:
    """A computed cumulative entropy with the route that produced it."""

    kind: EntropyKind
    value: float
    method: str
    error_estimate: float
    evaluations: int = 0
    route: str = ""
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def require_non_negative(dist: DistributionSpec):
    """
    Raises:
        CapabilityError: support extends below 0
    """
    if not dist.non_negative:
        raise CapabilityError(
            f"{dist.label}: support extends below 0; cumulative entropies are defined on (0, +inf) only")


def _level(dist: DistributionSpec, kind: EntropyKind) -> Callable[[float], float]:
    if kind.residual:
        return lambda x: sf(dist, x)
    return lambda x: cdf(dist, x)


def _integrand(dist: DistributionSpec, kind: EntropyKind) -> Callable[[float], float]:
    level = _level(dist, kind)
    if kind.weighted:
        return lambda x: -x * xlogx(level(x))
    return lambda x: -xlogx(level(x))


def _boundary_warnings(dist: DistributionSpec, kind: EntropyKind) -> List[str]:
    """Check x u log u (x^2 u log u / 2 when weighted) at the extreme quantiles."""
    level = _level(dist, kind)
    power = 2 if kind.weighted else 1
    scale = 0.5 if kind.weighted else 1.0

    abscissae = []
    for p in Config.BOUNDARY_PROBE_QUANTILES:
        try:
            abscissae.append(quantile(dist, p))
        except (EntropyToolkitError, ValueError, ArithmeticError):
            logger.debug("%s: quantile at %g unavailable for boundary check", dist.label, p)

    return check_boundary_products(
        lambda x: scale * x ** power * xlogx(level(x)), abscissae,
        label=f"{dist.label} {kind.value} boundary product")


def _integrate_entropy(dist: DistributionSpec, kind: EntropyKind, tol: Tolerance) -> Tuple[IntegralResult, str]:
    g = _integrand(dist, kind)
    lower, upper = dist.support

    if not math.isinf(upper):
        return integrate(g, lower, upper, tol), "finite"

    use_quantile = (Config.INFINITE_SUPPORT_ROUTE == "quantile"
                    and dist.law.has_closed_quantile and dist.has_pdf)
    if use_quantile:
        try:
            result = integrate_quantile(g, lambda p: quantile(dist, p), lambda x: pdf(dist, x), tol)
            if result.converged:
                return result, "quantile"
            logger.debug("%s %s: quantile route not converged, switching to mapped rule",
                         dist.label, kind.value)
        except (IntegrationError, OverflowError, ZeroDivisionError) as exc:
            logger.debug("%s %s: quantile route failed (%s), switching to mapped rule",
                         dist.label, kind.value, exc)

    return integrate(g, lower, upper, tol), "mapped"


def entropy(dist: DistributionSpec, kind: EntropyKind, tol: Tolerance = DEFAULT_TOLERANCE) -> EntropyValue:
    """
    Cumulative entropy of the given kind by quadrature.

    Args:
        dist: Parent distribution (non-negative support)
        kind: Measure to compute
        tol: Quadrature tolerance

    Returns:
        EntropyValue (method "quadrature", or "plugin" for empirical laws)

    Raises:
        CapabilityError: support below 0
        IntegrationError: quadrature did not converge (carries the best estimate)
    """
    require_non_negative(dist)
    if dist.is_empirical:
        return empirical_plugin(dist, kind)

    result, route = _integrate_entropy(dist, kind, tol)
    if not result.converged:
        raise IntegrationError(
            f"{dist.label}: {kind.value.upper()} integral did not converge "
            f"(best estimate {result.value:.10g}, error {result.abs_error_estimate:.2e})", result)

    warnings = tuple(_boundary_warnings(dist, kind))
    logger.debug("%s %s = %.12g via %s (%d evaluations)", dist.label, kind.value, result.value,
                 route, result.evaluations)
    return EntropyValue(kind=kind, value=max(result.value, 0.0), method="quadrature",
                        error_estimate=result.abs_error_estimate, evaluations=result.evaluations,
                        route=route, warnings=warnings)


def cre(dist: DistributionSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> EntropyValue:
    """Cumulative residual entropy -integral F̄ log F̄."""
    return entropy(dist, EntropyKind.CRE, tol)


def ce(dist: DistributionSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> EntropyValue:
    """Cumulative entropy -integral F log F."""
    return entropy(dist, EntropyKind.CE, tol)


def wcre(dist: DistributionSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> EntropyValue:
    return entropy(dist, EntropyKind.WCRE, tol)


def wce(dist: DistributionSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> EntropyValue:
    return entropy(dist, EntropyKind.WCE, tol)


def _neg_xlogx(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = (u > 0.0) & (u < 1.0)
    out[inside] = -u[inside] * np.log(u[inside])
    return out


def empirical_plugin(dist: DistributionSpec, kind: EntropyKind) -> EntropyValue:
    """
    Plug-in entropy of an empirical law as an exact sum over sample gaps.

    On [x_(i), x_(i+1)) the step cdf is constant, so each gap contributes
    (x_(i+1) - x_(i)) * (-u log u), or (x_(i+1)^2 - x_(i)^2)/2 * (-u log u)
    for the weighted measures.

    Raises:
        CapabilityError: dist is not empirical
    """
    if not dist.is_empirical:
        raise CapabilityError(f"{dist.label} is not an empirical distribution")

    values, levels = dist.law.step_points()
    if len(values) < 2:
        message = f"{dist.label}: fewer than 2 distinct sample values; {kind.value.upper()} is 0"
        logger.warning(f"⚠ {message}")
        return EntropyValue(kind=kind, value=0.0, method="plugin", error_estimate=0.0,
                            route="gap_sum", warnings=(message,))

    left, right = values[:-1], values[1:]
    u = 1.0 - levels[:-1] if kind.residual else levels[:-1]
    widths = (right ** 2 - left ** 2) / 2.0 if kind.weighted else right - left
    value = math.fsum((widths * _neg_xlogx(u)).tolist())
    return EntropyValue(kind=kind, value=value, method="plugin", error_estimate=0.0, route="gap_sum")
