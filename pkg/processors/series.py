"""
Order-Statistic Series

Truncated series for the cumulative entropies in terms of extreme moments,

    CRE  =  sum mu_{n+1:n+1} / (n(n+1)) - E X
    CE   =  E X - sum mu_{1:n+1} / (n(n+1))
    WCRE =  (1/2) sum mu2_{n+1:n+1} / (n(n+1)) - (1/2) E X^2
    WCE  =  (1/2) E X^2 - (1/2) sum mu2_{1:n+1} / (n(n+1))
    CRE + CE = sum (mu_{n+1:n+1} - mu_{1:n+1}) / (n(n+1))

Every term is non-negative, so truncation after m terms gives a one-sided
bound; the other side of the bracket adds a majorant of the dropped tail
(Hartley-David-Gumbel on the means, the range bound on the sum identity).
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from analytics.bounds import hdg_cre_tail, range_sum_tail
from config.settings import Config
from core.distributions import DistributionSpec, MomentPair, first_moment, moments, sf
from core.exceptions import MomentUndefinedError
from core.quadrature import integrate
from processors.entropies import EntropyKind, require_non_negative
from processors.order_stats import LARGEST, SMALLEST, moment_sequence
from utils.logging_config import get_logger
from utils.summation import compensated_sum, series_remainder

logger = get_logger("processors.series")

SUM_IDENTITY = "sum"
SeriesKind = Union[EntropyKind, str]
# series that need only a finite mean
_FIRST_ORDER_KINDS = (EntropyKind.CRE.value, EntropyKind.CE.value)


@dataclass(eq=False)
class SeriesApproximation:
    """Truncated series with its per-n ledger and a certified bracket."""

    kind: str
    m: int
    ns: np.ndarray
    moments: np.ndarray
    weights: np.ndarray
    partial_sum: float
    point_estimate: float
    lower: float
    upper: float
    certified_lower: bool = True
    certified_upper: bool = True
    degenerate: bool = False
    converged: bool = True
    warnings: List[str] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def terms(self) -> np.ndarray:
        return self.weights * self.moments

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    def ledger(self) -> Iterator[Tuple[int, float, float, float]]:
        """(n, moment, weight, term) rows."""
        for n, moment, weight, term in zip(self.ns, self.moments, self.weights, self.terms):
            yield int(n), float(moment), float(weight), float(term)

    def summary(self) -> dict:
        return {
            "partial_sum": self.partial_sum,
            "point_estimate": self.point_estimate,
            "lower": self.lower,
            "upper": self.upper,
            "width": self.width,
            "m_used": self.m,
            "certified_lower": self.certified_lower,
            "certified_upper": self.certified_upper,
            "degenerate": self.degenerate,
            "converged": self.converged,
        }


def _kind_name(kind: SeriesKind) -> str:
    return kind.value if isinstance(kind, EntropyKind) else str(kind)


def _check_m(m: int):
    if m < 1:
        raise ValueError(f"truncation index m must be >= 1, got {m}")


def _weights(ns: np.ndarray) -> np.ndarray:
    return 1.0 / (ns * (ns + 1.0))


def _telescoped_weights(ns: np.ndarray) -> np.ndarray:
    return 1.0 / ns - 1.0 / (ns + 1.0)


def _degenerate(kind: str, m: int) -> SeriesApproximation:
    message = f"degenerate law (sigma = 0): {kind} series is 0"
    logger.warning(f"⚠ {message}")
    ns = np.arange(1, m + 1, dtype=float)
    zeros = np.zeros_like(ns)
    return SeriesApproximation(kind=kind, m=m, ns=ns, moments=zeros, weights=_weights(ns),
                               partial_sum=0.0, point_estimate=0.0, lower=0.0, upper=0.0,
                               degenerate=True, warnings=[message])


# ==================== TAIL MAJORANTS ====================

def _mean_tail(pair: MomentPair, m: int) -> float:
    """HDG majorant of sum_{n>m} mu_{n+1:n+1}/(n(n+1)) = sigma T(m) + mu/(m+1)."""
    return pair.sigma * hdg_cre_tail(m) + pair.mean / (m + 1.0)


@lru_cache(maxsize=64)
def _raw_moment(dist: DistributionSpec, order: int) -> Optional[float]:
    """E X^order by the survival integral; None when it does not converge."""
    result = integrate(lambda x: order * x ** (order - 1) * sf(dist, x), dist.support[0], dist.support[1])
    if not result.converged or not math.isfinite(result.value):
        return None
    return result.value


@lru_cache(maxsize=4096)
def _power_tail(m: int, p: int) -> float:
    """sum_{n>m} (n+1)^{1/p} / (n(n+1))."""
    return series_remainder(lambda ns: 1.0 / (ns * (ns + 1.0) ** (1.0 - 1.0 / p)), m + 1)


def _second_moment_tail(dist: DistributionSpec, pair: MomentPair, m: int) -> Optional[float]:
    """
    Majorant of (1/2) sum_{n>m} mu2_{n+1:n+1}/(n(n+1)), or None when only the
    divergent crude bound (n+1) E X^2 is available.

    Candidates, smallest wins:
      - b^2 on a bounded support [0, b];
      - HDG applied to X^2 (needs E X^4): mu2_{n+1:n+1} <= E X^2 + sd(X^2) n/sqrt(2n+1);
      - power mean (needs E X^{2p}): mu2_{n+1:n+1} <= ((n+1) E X^{2p})^{1/p}.
    """
    candidates = []
    if dist.bounded_support and math.isfinite(dist.support[1]):
        candidates.append(0.5 * dist.support[1] ** 2 / (m + 1.0))
    if pair.fourth_moment is not None:
        sd_square = math.sqrt(max(pair.fourth_moment - pair.second_moment ** 2, 0.0))
        candidates.append(0.5 * (sd_square * hdg_cre_tail(m) + pair.second_moment / (m + 1.0)))
        p = Config.SERIES_POWER_MAJORANT_P
        high = _raw_moment(dist, 2 * p)
        if high is not None:
            candidates.append(0.5 * high ** (1.0 / p) * _power_tail(m, p))
    return min(candidates) if candidates else None


def tail_majorant(dist: DistributionSpec, kind: SeriesKind, m: int) -> float:
    """Width upper - lower of the bracket at truncation m (inf when uncertified)."""
    name = _kind_name(kind)
    if name in _FIRST_ORDER_KINDS:
        try:
            pair = moments(dist)
        except MomentUndefinedError:
            first_moment(dist)
            return math.inf
        return _mean_tail(pair, m)
    pair = moments(dist)
    if name == EntropyKind.WCRE.value:
        tail = _second_moment_tail(dist, pair, m)
        return math.inf if tail is None else tail
    if name == EntropyKind.WCE.value:
        return 0.5 * pair.second_moment / (m + 1.0)
    if name == SUM_IDENTITY:
        return pair.sigma * range_sum_tail(m)
    raise ValueError(f"unknown series kind {kind!r}")


# ==================== SERIES ====================

def _prepare(dist: DistributionSpec, m: int) -> Tuple[MomentPair, np.ndarray]:
    _check_m(m)
    require_non_negative(dist)
    return moments(dist), np.arange(1, m + 1, dtype=float)


def _prepare_first_order(dist: DistributionSpec, m: int,
                         kind: str) -> Tuple[Optional[MomentPair], float, np.ndarray, Optional[str]]:
    """
    Moments for the CRE/CE series, which need only a finite mean.

    Returns (pair, mean, ns, warning); pair is None and warning is set when
    the variance is undefined, so the HDG tail majorant is unavailable.
    """
    _check_m(m)
    require_non_negative(dist)
    ns = np.arange(1, m + 1, dtype=float)
    try:
        pair = moments(dist)
    except MomentUndefinedError as exc:
        mean = first_moment(dist)
        message = f"{kind}: variance undefined, tail majorant unavailable ({exc})"
        logger.warning(f"⚠ {dist.label}: {message}")
        return None, mean, ns, message
    return pair, pair.mean, ns, None


def cre_series(dist: DistributionSpec, m: int) -> SeriesApproximation:
    """
    CRE series truncated at m: lower = point estimate, upper adds the HDG tail.

    With an infinite variance the upper end is inf and certified_upper False.

    Raises:
        ValueError: m < 1
        CapabilityError: support below 0
        MomentUndefinedError: the mean diverges
    """
    pair, mean, ns, warning = _prepare_first_order(dist, m, EntropyKind.CRE.value)
    if pair is not None and pair.sigma == 0.0:
        return _degenerate(EntropyKind.CRE.value, m)

    largest = moment_sequence(dist, LARGEST, 1, ns + 1.0)
    weights = _weights(ns)
    partial = compensated_sum(weights * largest)
    point = partial - mean
    if pair is None:
        return SeriesApproximation(kind=EntropyKind.CRE.value, m=m, ns=ns, moments=largest, weights=weights,
                                   partial_sum=partial, point_estimate=point, lower=point, upper=math.inf,
                                   certified_upper=False, warnings=[warning])
    return SeriesApproximation(kind=EntropyKind.CRE.value, m=m, ns=ns, moments=largest, weights=weights,
                               partial_sum=partial, point_estimate=point, lower=point,
                               upper=point + _mean_tail(pair, m))


def ce_series(dist: DistributionSpec, m: int) -> SeriesApproximation:
    """
    CE series truncated at m: upper = point estimate, lower subtracts the HDG tail.

    With an infinite variance the lower end falls back to CE >= 0 and
    certified_lower is False.
    """
    pair, mean, ns, warning = _prepare_first_order(dist, m, EntropyKind.CE.value)
    if pair is not None and pair.sigma == 0.0:
        return _degenerate(EntropyKind.CE.value, m)

    smallest = moment_sequence(dist, SMALLEST, 1, ns + 1.0)
    weights = _weights(ns)
    partial = compensated_sum(weights * smallest)
    point = mean - partial
    if pair is None:
        return SeriesApproximation(kind=EntropyKind.CE.value, m=m, ns=ns, moments=smallest, weights=weights,
                                   partial_sum=partial, point_estimate=point, lower=0.0, upper=point,
                                   certified_lower=False, warnings=[warning])
    return SeriesApproximation(kind=EntropyKind.CE.value, m=m, ns=ns, moments=smallest, weights=weights,
                               partial_sum=partial, point_estimate=point,
                               lower=point - _mean_tail(pair, m), upper=point)


def wcre_series(dist: DistributionSpec, m: int) -> SeriesApproximation:
    """
    WCRE series truncated at m.

    The upper end is certified by b^2 (bounded support), by HDG on X^2 or by
    the power-mean majorant (finite fourth moment); otherwise it is +inf and
    certified_upper is False.
    """
    pair, ns = _prepare(dist, m)
    if pair.sigma == 0.0:
        return _degenerate(EntropyKind.WCRE.value, m)

    largest = moment_sequence(dist, LARGEST, 2, ns + 1.0)
    weights = _weights(ns)
    partial = 0.5 * compensated_sum(weights * largest)
    point = partial - 0.5 * pair.second_moment
    tail = _second_moment_tail(dist, pair, m)

    approx = SeriesApproximation(kind=EntropyKind.WCRE.value, m=m, ns=ns, moments=largest, weights=weights,
                                 partial_sum=partial, point_estimate=point, lower=point,
                                 upper=math.inf if tail is None else point + tail,
                                 certified_upper=tail is not None)
    if tail is None:
        message = (f"{dist.label}: no convergent second-moment majorant "
                   f"(unbounded support, E X^4 undefined); WCRE upper end not certified")
        logger.warning(f"⚠ {message}")
        approx.warnings.append(message)
    return approx


def wce_series(dist: DistributionSpec, m: int) -> SeriesApproximation:
    """WCE series truncated at m: upper = point estimate, lower uses mu2_{1:n+1} <= E X^2."""
    pair, ns = _prepare(dist, m)
    if pair.sigma == 0.0:
        return _degenerate(EntropyKind.WCE.value, m)

    smallest = moment_sequence(dist, SMALLEST, 2, ns + 1.0)
    weights = _weights(ns)
    partial = 0.5 * compensated_sum(weights * smallest)
    point = 0.5 * pair.second_moment - partial
    return SeriesApproximation(kind=EntropyKind.WCE.value, m=m, ns=ns, moments=smallest, weights=weights,
                               partial_sum=partial, point_estimate=point,
                               lower=point - 0.5 * pair.second_moment / (m + 1.0), upper=point)


def sum_identity(dist: DistributionSpec, m: int) -> SeriesApproximation:
    """CRE + CE as the range series; upper adds sigma sum_{n>m} sqrt 2/(n sqrt(n+1))."""
    pair, ns = _prepare(dist, m)
    if pair.sigma == 0.0:
        return _degenerate(SUM_IDENTITY, m)

    ranges = moment_sequence(dist, LARGEST, 1, ns + 1.0) - moment_sequence(dist, SMALLEST, 1, ns + 1.0)
    weights = _weights(ns)
    partial = compensated_sum(weights * ranges)
    return SeriesApproximation(kind=SUM_IDENTITY, m=m, ns=ns, moments=ranges, weights=weights,
                               partial_sum=partial, point_estimate=partial, lower=partial,
                               upper=partial + pair.sigma * range_sum_tail(m))


SERIES = {
    EntropyKind.CRE.value: cre_series,
    EntropyKind.CE.value: ce_series,
    EntropyKind.WCRE.value: wcre_series,
    EntropyKind.WCE.value: wce_series,
    SUM_IDENTITY: sum_identity,
}


def series(dist: DistributionSpec, kind: SeriesKind, m: int) -> SeriesApproximation:
    name = _kind_name(kind)
    if name not in SERIES:
        raise ValueError(f"unknown series kind {kind!r} (expected one of {', '.join(SERIES)})")
    return SERIES[name](dist, m)


def telescoped_partial_sum(dist: DistributionSpec, kind: SeriesKind, m: int) -> float:
    """
    Partial sum with weights written as 1/n - 1/(n+1) (the telescoped form of
    the CRE and CE series). Includes the factor 1/2 for the weighted kinds.
    """
    _check_m(m)
    name = _kind_name(kind)
    ns = np.arange(1, m + 1, dtype=float)
    which = SMALLEST if name in (EntropyKind.CE.value, EntropyKind.WCE.value) else LARGEST
    order = 2 if name in (EntropyKind.WCRE.value, EntropyKind.WCE.value) else 1
    values = moment_sequence(dist, which, order, ns + 1.0)
    total = compensated_sum(_telescoped_weights(ns) * values)
    return 0.5 * total if order == 2 else total


def converge(dist: DistributionSpec, kind: SeriesKind, target_width: float = Config.SERIES_DEFAULT_WIDTH,
             m_max: int = Config.SERIES_M_MAX) -> SeriesApproximation:
    """
    Smallest m <= m_max whose bracket width is at most target_width.

    The width depends on m only through the tail majorant, which decreases
    in m, so m is found by bisection before any moment is evaluated. When
    m_max does not reach the target the m_max result is returned with
    converged=False.

    Raises:
        ValueError: target_width <= 0 or m_max < 1
    """
    if not target_width > 0:
        raise ValueError(f"target width must be > 0, got {target_width}")
    _check_m(m_max)
    require_non_negative(dist)

    name = _kind_name(kind)
    try:
        degenerate = moments(dist).sigma == 0.0
    except MomentUndefinedError:
        if name not in _FIRST_ORDER_KINDS:
            raise
        degenerate = False
    if degenerate:
        return series(dist, name, 1)

    def width(m: int) -> float:
        return tail_majorant(dist, name, m)

    if width(m_max) > target_width:
        approx = series(dist, name, m_max)
        approx.converged = False
        message = (f"{dist.label} {name}: bracket width {approx.width:.3e} at m_max={m_max} "
                   f"exceeds target {target_width:.3e}")
        logger.warning(f"⚠ {message}")
        approx.warnings.append(message)
        return approx

    lo, hi = 1, m_max
    while lo < hi:
        mid = (lo + hi) // 2
        if width(mid) <= target_width:
            hi = mid
        else:
            lo = mid + 1

    approx = series(dist, name, lo)
    logger.debug("%s %s converged at m=%d (width %.3e)", dist.label, name, lo, approx.width)
    return approx
