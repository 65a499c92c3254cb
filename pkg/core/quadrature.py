"""
Adaptive quadrature engine.

Thin, instrumented layer over QUADPACK (scipy.integrate.quad): QAGS on finite
intervals, QAGI on semi-infinite ones. Adds evaluation counting, a NaN guard
that names the offending abscissa, an explicit convergence verdict and the
quantile change of variables used for entropy integrals on infinite supports.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

from scipy import integrate as _scipy_integrate

from config.settings import Config
from core.exceptions import DomainError, EntropyToolkitError, IntegrandNaNError, IntegrationError
from utils.logging_config import get_logger

logger = get_logger("core.quadrature")

XLOGX_SLACK = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Requested accuracy and evaluation budget for one integral."""

    abs_tol: float = Config.QUAD_ABS_TOL
    rel_tol: float = Config.QUAD_REL_TOL
    max_evaluations: int = Config.QUAD_MAX_EVALUATIONS

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_evaluations > 0):
            raise ValueError(f"Tolerance fields must be strictly positive, got {self}")

    def allowed_error(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def with_abs(self, abs_tol: float) -> "Tolerance":
        return Tolerance(abs_tol=abs_tol, rel_tol=self.rel_tol, max_evaluations=self.max_evaluations)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class IntegralResult:
    """Quadrature value with QUADPACK error estimate and evaluation count."""

    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool
    message: str = ""


class _CountingIntegrand:
    """
    Wraps an integrand: counts calls and turns NaN into a hard error.

    Arithmetic failures inside the integrand (overflow, division by zero, math
    domain errors) are re-raised as IntegrationError naming the abscissa.
    """

    def __init__(self, f: Callable[[float], float]):
        self.f = f
        self.calls = 0

    def __call__(self, x: float) -> float:
        self.calls += 1
        try:
            y = self.f(x)
        except EntropyToolkitError:
            raise
        except (ArithmeticError, ValueError) as e:
            raise IntegrationError(f"integrand failed at x = {x!r}: {e}") from e
        if math.isnan(y):
            raise IntegrandNaNError(x)
        return y


def integrate(f: Callable[[float], float], lower: float, upper: float,
              tol: Tolerance = DEFAULT_TOLERANCE, points: Optional[Iterable[float]] = None) -> IntegralResult:
    """
    Integrate f over (lower, upper); upper may be math.inf.

    Endpoints are never evaluated (Gauss-Kronrod abscissae are interior), so
    integrable endpoint singularities are allowed.

    Args:
        f: Scalar integrand
        lower: Finite lower limit
        upper: Upper limit, finite or math.inf
        tol: Requested tolerance and evaluation budget
        points: Optional interior break points (finite intervals only)

    Returns:
        IntegralResult; converged=False when the budget ran out or QUADPACK
        could not reach the tolerance (value is then the best estimate)

    Raises:
        IntegrandNaNError: f returned NaN
    """
    if upper == lower:
        return IntegralResult(0.0, 0.0, 0, True)

    wrapped = _CountingIntegrand(f)
    infinite = math.isinf(upper) or math.isinf(lower)
    per_interval = Config.QUAD_POINTS_PER_INTERVAL_INF if infinite else Config.QUAD_POINTS_PER_INTERVAL
    limit = max(50, tol.max_evaluations // per_interval)

    kwargs = dict(epsabs=tol.abs_tol, epsrel=tol.rel_tol, limit=limit, full_output=1)
    if points is not None and not infinite:
        kwargs["points"] = list(points)

    out = _scipy_integrate.quad(wrapped, lower, upper, **kwargs)
    value, abserr, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else ""
    ier = 0 if len(out) == 3 else 1

    evaluations = int(info.get("neval", wrapped.calls)) if isinstance(info, dict) else wrapped.calls
    converged = math.isfinite(value) and (ier == 0 or abserr <= tol.allowed_error(value))
    if not converged:
        logger.debug("quadrature on (%s, %s) not converged: %s", lower, upper, message)

    return IntegralResult(float(value), float(abs(abserr)), evaluations, converged,
                          message if isinstance(message, str) else str(message))


def integrate_quantile(h: Callable[[float], float], quantile: Callable[[float], float],
                       density: Callable[[float], float],
                       tol: Tolerance = DEFAULT_TOLERANCE) -> IntegralResult:
    """
    Integrate h(x) over a support by the substitution x = Q(p), dx = dp / f(Q(p)).

    Args:
        h: Integrand in the original variable
        quantile: Quantile function Q on (0, 1)
        density: Density f of the law
        tol: Requested tolerance

    Returns:
        IntegralResult of integral_0^1 h(Q(p)) / f(Q(p)) dp
    """
    def substituted(p: float) -> float:
        x = quantile(p)
        fx = density(x)
        if fx <= 0.0:
            return 0.0
        return h(x) / fx

    return integrate(substituted, 0.0, 1.0, tol)


def xlogx(u: float) -> float:
    """
    u log u with its continuous extension 0 at u = 0.

    Values within 1e-12 outside [0, 1] are clamped (round-off of 1 - F).

    Raises:
        DomainError: u outside [0, 1] by more than the slack
    """
    if u < -XLOGX_SLACK or u > 1.0 + XLOGX_SLACK or math.isnan(u):
        raise DomainError(f"xlogx argument {u!r} outside [0, 1]")
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 0.0
    return u * math.log(u)


def check_boundary_products(product: Callable[[float], float], abscissae: Iterable[float],
                            label: str = "boundary product") -> List[str]:
    """
    Evaluate boundary products (e.g. x F̄ log F̄) at the outermost abscissae.

    Integration by parts behind every series identity assumes these products
    vanish at the support ends; large values are reported, not fatal.

    Returns:
        Warning strings, one per abscissa where |product| > threshold
    """
    warnings = []
    for x in abscissae:
        try:
            value = product(x)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if math.isfinite(value) and abs(value) > Config.BOUNDARY_WARN_THRESHOLD:
            message = f"{label} = {value:.3e} at x = {x:.6g} (limit hypothesis may not hold)"
            logger.warning(f"⚠ {message}")
            warnings.append(message)
    return warnings
