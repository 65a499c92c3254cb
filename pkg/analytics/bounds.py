"""
Entropy Bounds Module

Upper and lower bounds on CRE, CE and CRE + CE obtained by plugging
classical bounds on the expected extremes into the order-statistic series:

- Hartley-David-Gumbel:   mu_{n:n} <= sigma (n-1)/sqrt(2n-1) + mu
- David-Nagaraja:         mu_{n:n} <= sigma n c(n)/2 + mu            (symmetric, bounded support)
- Arnold-Balakrishnan:    mu_{n:n} <= sigma n/sqrt 2 sqrt(1/(2n-1) - B(n,n)) + mu   (symmetric)
- range bound:            mu_{n:n} - mu_{1:n} <= sigma sqrt(2n)
- Rychlik (DFR):          mu_{1:n} <= sqrt(E X^2) / (sqrt 2 n)

The infinite-series constants are computed, never hard-coded: explicit
compensated sums completed with an integral remainder, cached on first use.
"""

import math
import threading
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np
from scipy import special

from config.settings import Config
from core.distributions import DistributionSpec, moments
from core.exceptions import EntropyToolkitError, IntegrationError
from core.quadrature import DEFAULT_TOLERANCE, Tolerance
from utils.logging_config import get_logger
from utils.summation import compensated_sum, series_constant, series_remainder

logger = get_logger("analytics.bounds")

SQRT2 = math.sqrt(2.0)
DFR_CE_FACTOR = 2.0 - math.pi ** 2 / 6.0  # sum_{n>=1} 1 / (n (n+1)^2)


# ==================== SPECIAL FUNCTIONS ====================

def complete_beta(n):
    """B(n, n) = Gamma(n)^2 / Gamma(2n) via log-gamma; accepts scalars or arrays."""
    n = np.asarray(n, dtype=float)
    value = np.exp(2.0 * special.gammaln(n) - special.gammaln(2.0 * n))
    return float(value) if value.ndim == 0 else value


def _log_central_binomial(k: np.ndarray) -> np.ndarray:
    """log binom(2k, k)."""
    return special.gammaln(2.0 * k + 1.0) - 2.0 * special.gammaln(k + 1.0)


def c_of_n(n):
    """
    c(n) = sqrt(2 (1 - 1/binom(2n-2, n-1)) / (2n-1)).

    The binomial is exact for n <= 30 and taken in log space beyond.
    """
    if np.ndim(n) == 0:
        n = int(n)
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if n <= 30:
            inv_binom = 1.0 / math.comb(2 * n - 2, n - 1)
        else:
            inv_binom = math.exp(-float(_log_central_binomial(np.float64(n - 1))))
        return math.sqrt(2.0 * (1.0 - inv_binom) / (2 * n - 1))

    ns = np.asarray(n, dtype=float)
    inv_binom = np.exp(-_log_central_binomial(ns - 1.0))
    return np.sqrt(2.0 * (1.0 - inv_binom) / (2.0 * ns - 1.0))


# ==================== SERIES TERMS ====================

def hdg_cre_terms(ns):
    """sigma-coefficient of the HDG-majorised CRE series: 1 / ((n+1) sqrt(2n+1))."""
    return 1.0 / ((ns + 1.0) * np.sqrt(2.0 * ns + 1.0))


def range_sum_terms(ns):
    """sqrt(2) / (n sqrt(n+1))."""
    return SQRT2 / (ns * np.sqrt(ns + 1.0))


def symmetric_bounded_terms(ns):
    """c(n+1) / n: the David-Nagaraja bound on mu_{n+1:n+1} summed with weight 1/(n(n+1))."""
    return c_of_n(ns + 1.0) / ns


def symmetric_cre_terms(ns):
    """(1/n) sqrt(1/(2n+1) - B(n+1, n+1))."""
    ns = np.asarray(ns, dtype=float)
    return np.sqrt(1.0 / (2.0 * ns + 1.0) - complete_beta(ns + 1.0)) / ns


# ==================== CONSTANTS ====================

@dataclass(frozen=True)
class BoundConstants:
    hdg_cre: float            # ~1.21
    range_sum: float          # ~3.09
    symmetric_bounded: float  # (1/2) sum c(n+1)/n
    symmetric_cre: float      # (1/sqrt 2) sum (1/n) sqrt(1/(2n+1) - B(n+1,n+1))


class _ConstantCache:
    """Lazy, idempotent and thread-safe holder of the bound constants."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value: Optional[BoundConstants] = None

    def get(self) -> BoundConstants:
        if self._value is None:
            with self._lock:
                if self._value is None:
                    self._value = _compute_constants()
        return self._value

    def reset(self):
        with self._lock:
            self._value = None


def _compute_constants() -> BoundConstants:
    value = BoundConstants(
        hdg_cre=series_constant(hdg_cre_terms),
        range_sum=series_constant(range_sum_terms),
        symmetric_bounded=0.5 * series_constant(symmetric_bounded_terms),
        symmetric_cre=series_constant(symmetric_cre_terms) / SQRT2,
    )
    logger.debug("bound constants: %s", value)
    return value


CONSTANTS = _ConstantCache()


def constants() -> BoundConstants:
    return CONSTANTS.get()


@lru_cache(maxsize=4096)
def hdg_cre_tail(m: int) -> float:
    """sum_{n>m} 1 / ((n+1) sqrt(2n+1))."""
    return series_remainder(hdg_cre_terms, m + 1) if m > 0 else constants().hdg_cre


@lru_cache(maxsize=4096)
def range_sum_tail(m: int) -> float:
    """sum_{n>m} sqrt(2) / (n sqrt(n+1))."""
    return series_remainder(range_sum_terms, m + 1) if m > 0 else constants().range_sum


def symmetric_cre_partial_sum(m: int) -> float:
    """(1/sqrt 2) sum_{n=1}^m (1/n) sqrt(1/(2n+1) - B(n+1,n+1)); the sigma = 1 partial bound."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return compensated_sum(symmetric_cre_terms(np.arange(1, m + 1, dtype=float))) / SQRT2


# ==================== BOUNDS ====================

def _check_sigma(sigma: float):
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")


def hdg_extreme_bound(n: int, mu: float, sigma: float) -> float:
    """Hartley-David-Gumbel bound sigma (n-1)/sqrt(2n-1) + mu on mu_{n:n}."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_sigma(sigma)
    return sigma * (n - 1) / math.sqrt(2 * n - 1) + mu


def cre_upper_hdg(sigma: float) -> float:
    """CRE <= sigma sum 1/((n+1) sqrt(2n+1)) ~ 1.21 sigma."""
    _check_sigma(sigma)
    return sigma * constants().hdg_cre


def ce_lower_dfr(mean: float, second_moment: float) -> float:
    """
    DFR lower bound CE >= E X - sqrt(E X^2)/sqrt 2 (2 - pi^2/6).

    The caller is responsible for the DFR hypothesis; the value is computed
    regardless.
    """
    return mean - math.sqrt(second_moment) / SQRT2 * DFR_CE_FACTOR


def cre_upper_symmetric_bounded(sigma: float) -> float:
    """CRE <= (sigma/2) sum c(n+1)/n for symmetric laws with bounded support."""
    _check_sigma(sigma)
    return sigma * constants().symmetric_bounded


def cre_upper_symmetric(sigma: float) -> float:
    """CRE <= (sigma/sqrt 2) sum (1/n) sqrt(1/(2n+1) - B(n+1,n+1)) for symmetric laws."""
    _check_sigma(sigma)
    return sigma * constants().symmetric_cre


def range_bound(n_plus_1: int, sigma: float) -> float:
    """mu_{n+1:n+1} - mu_{1:n+1} <= sigma sqrt(2(n+1))."""
    _check_sigma(sigma)
    return sigma * math.sqrt(2.0 * n_plus_1)


def sum_upper(sigma: float) -> float:
    """CRE + CE <= sigma sum sqrt 2/(n sqrt(n+1)) ~ 3.09 sigma."""
    _check_sigma(sigma)
    return sigma * constants().range_sum


def sum_upper_symmetric(sigma: float) -> float:
    """CRE + CE <= sqrt 2 sigma sum (1/n) sqrt(1/(2n+1) - B(n+1,n+1)), i.e. twice the symmetric CRE bound."""
    return 2.0 * cre_upper_symmetric(sigma)


def symmetric_extreme_bound(n: int, mu: float, sigma: float) -> float:
    """David-Nagaraja: mu_{n:n} <= sigma n c(n)/2 + mu (symmetric, bounded support)."""
    _check_sigma(sigma)
    return 0.5 * sigma * n * c_of_n(n) + mu


def _ab_root(n: int) -> float:
    return math.sqrt(max(1.0 / (2 * n - 1) - complete_beta(n), 0.0))


def ab_extreme_bound(n: int, mu: float, sigma: float) -> float:
    """Arnold-Balakrishnan: mu_{n:n} <= sigma n/sqrt 2 sqrt(1/(2n-1) - B(n,n)) + mu (symmetric)."""
    _check_sigma(sigma)
    return sigma * n / SQRT2 * _ab_root(n) + mu


def ab_range_bound(n: int, sigma: float) -> float:
    """mu_{n:n} - mu_{1:n} <= sigma n sqrt 2 sqrt(1/(2n-1) - B(n,n)) (symmetric)."""
    _check_sigma(sigma)
    return sigma * n * SQRT2 * _ab_root(n)


def rychlik_min_bound(n: int, second_moment: float) -> float:
    """DFR bound on the expected minimum: mu_{1:n} <= sqrt(E X^2) / (sqrt 2 n)."""
    return math.sqrt(second_moment) / (SQRT2 * n)


def rychlik_delta(n: int, j: int) -> float:
    """delta_j = sum_{k=1}^j 1/(n+1-k)."""
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    return math.fsum(1.0 / (n + 1 - k) for k in range(1, j + 1))


def rychlik_condition(n: int, j: int) -> bool:
    """Whether delta_j <= 2, the hypothesis of the DFR extreme bound."""
    return rychlik_delta(n, j) <= 2.0


# ==================== REPORT ====================

@dataclass
class BoundEntry:
    """One theorem evaluated on one distribution."""

    name: str
    description: str
    direction: str = "upper"
    applicable: bool = True
    reason: str = ""
    bound_value: Optional[float] = None
    measured_value: Optional[float] = None
    satisfied: Optional[bool] = None
    slack: Optional[float] = None
    error: Optional[str] = None

    def evaluate(self, bound: float, measured: float):
        self.bound_value = bound
        self.measured_value = measured
        if self.direction == "upper":
            self.slack = bound - measured
        else:
            self.slack = measured - bound
        self.satisfied = self.slack >= -Config.BOUND_SLACK


@dataclass
class BoundReport:
    distribution: Dict[str, object]
    entries: List[BoundEntry] = field(default_factory=list)
    measured: Dict[str, Optional[float]] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(e.satisfied for e in self.entries if e.applicable and e.error is None)

    @property
    def has_errors(self) -> bool:
        return any(e.error is not None for e in self.entries)

    def entry(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        return {
            "distribution": self.distribution,
            "measured": dict(self.measured),
            "entries": [asdict(e) for e in self.entries],
        }


def _gate(entry: BoundEntry, condition: bool, reason: str) -> bool:
    if not condition:
        entry.applicable = False
        entry.reason = reason
    return condition


def check_all(dist: DistributionSpec, tol: Tolerance = DEFAULT_TOLERANCE,
              sample_size: int = Config.REPORT_SAMPLE_SIZE) -> BoundReport:
    """
    Evaluate every bound on a distribution.

    CRE, CE and their sum are measured by quadrature; each bound is gated on
    the metadata flags (symmetry, bounded support, DFR) and compared with
    Config.BOUND_SLACK. A failure inside one entry is recorded on that entry
    and the report continues. If the moment quadrature itself fails, every
    applicable entry carries that error.

    Args:
        dist: Parent distribution with finite mean and variance
        tol: Quadrature tolerance for the measured values
        sample_size: n used for the per-sample-size extreme-mean bounds

    Returns:
        BoundReport with every theorem present exactly once

    Raises:
        CapabilityError: support below 0
        MomentUndefinedError: mean or variance diverges
    """
    from processors.entropies import ce, cre, require_non_negative
    from processors.order_stats import mean_largest, mean_smallest

    require_non_negative(dist)
    moment_failure = None
    try:
        pair = moments(dist)
        mu, sigma, second = pair.mean, pair.sigma, pair.second_moment
    except IntegrationError as exc:
        moment_failure = exc
        mu = sigma = second = math.nan
    symmetric = dist.symmetric_about is not None
    n = sample_size

    report = BoundReport(distribution=dist.summary())
    if moment_failure is None:
        report.measured.update({"mean": mu, "second_moment": second, "sigma": sigma})
    else:
        report.warnings.append(f"moments: {moment_failure}")
        logger.warning(f"✗ {dist.label}: moments failed: {moment_failure}")

    def measure(name, fn):
        try:
            value = fn()
        except (EntropyToolkitError, ArithmeticError) as exc:
            report.warnings.append(f"{name}: {exc}")
            logger.warning(f"✗ {dist.label}: {name} failed: {exc}")
            report.measured[name] = None
            return exc
        report.measured[name] = value
        return value

    def entropy_value(fn):
        result = fn(dist, tol)
        report.warnings.extend(result.warnings)
        return result.value

    cre_value = measure("cre", lambda: entropy_value(cre))
    ce_value = measure("ce", lambda: entropy_value(ce))
    if isinstance(cre_value, Exception) or isinstance(ce_value, Exception):
        sum_value = cre_value if isinstance(cre_value, Exception) else ce_value
    else:
        sum_value = cre_value + ce_value
        report.measured["cre_plus_ce"] = sum_value

    def add(entry: BoundEntry, gate: bool, reason: str, bound_fn, measured):
        report.entries.append(entry)
        if not _gate(entry, gate, reason):
            return
        if isinstance(measured, Exception):
            entry.error = str(measured)
            return
        if moment_failure is not None:
            entry.error = f"moments: {moment_failure}"
            return
        try:
            measured_value = measured() if callable(measured) else measured
            entry.evaluate(bound_fn(), measured_value)
        except (EntropyToolkitError, ArithmeticError) as exc:
            entry.error = str(exc)
            logger.warning(f"✗ {dist.label}: {entry.name} failed: {exc}")

    not_symmetric = "symmetric_about not set"
    add(BoundEntry("cre_upper_hdg", "CRE <= ~1.21 sigma (HDG)"),
        True, "", lambda: cre_upper_hdg(sigma), cre_value)
    add(BoundEntry("ce_lower_dfr", "CE >= E X - sqrt(E X^2)/sqrt 2 (2 - pi^2/6)", direction="lower"),
        dist.dfr is True, "DFR flag not set" if dist.dfr is None else "law is not DFR",
        lambda: ce_lower_dfr(mu, second), ce_value)
    add(BoundEntry("cre_upper_symmetric_bounded", "CRE <= (sigma/2) sum c(n+1)/n"),
        symmetric and dist.bounded_support,
        not_symmetric if not symmetric else "support is unbounded",
        lambda: cre_upper_symmetric_bounded(sigma), cre_value)
    add(BoundEntry("cre_upper_symmetric", "CRE <= (sigma/sqrt 2) sum (1/n) sqrt(1/(2n+1) - B(n+1,n+1))"),
        symmetric, not_symmetric, lambda: cre_upper_symmetric(sigma), cre_value)
    add(BoundEntry("sum_upper", "CRE + CE <= ~3.09 sigma"),
        True, "", lambda: sum_upper(sigma), sum_value)
    add(BoundEntry("sum_upper_symmetric", "CRE + CE <= sqrt 2 sigma sum (1/n) sqrt(1/(2n+1) - B(n+1,n+1))"),
        symmetric, not_symmetric, lambda: sum_upper_symmetric(sigma), sum_value)

    add(BoundEntry("hdg_extreme", f"mu_{{{n}:{n}}} <= sigma (n-1)/sqrt(2n-1) + mu"),
        True, "", lambda: hdg_extreme_bound(n, mu, sigma), lambda: mean_largest(dist, n))
    add(BoundEntry("range_extreme", f"mu_{{{n}:{n}}} - mu_{{1:{n}}} <= sigma sqrt(2n)"),
        True, "", lambda: range_bound(n, sigma), lambda: mean_largest(dist, n) - mean_smallest(dist, n))
    add(BoundEntry("symmetric_extreme", f"mu_{{{n}:{n}}} <= sigma n c(n)/2 + mu"),
        symmetric and dist.bounded_support,
        not_symmetric if not symmetric else "support is unbounded",
        lambda: symmetric_extreme_bound(n, mu, sigma), lambda: mean_largest(dist, n))
    add(BoundEntry("ab_extreme", f"mu_{{{n}:{n}}} <= sigma n/sqrt 2 sqrt(1/(2n-1) - B(n,n)) + mu"),
        symmetric, not_symmetric, lambda: ab_extreme_bound(n, mu, sigma), lambda: mean_largest(dist, n))
    add(BoundEntry("ab_range", f"mu_{{{n}:{n}}} - mu_{{1:{n}}} <= sigma n sqrt 2 sqrt(1/(2n-1) - B(n,n))"),
        symmetric, not_symmetric, lambda: ab_range_bound(n, sigma),
        lambda: mean_largest(dist, n) - mean_smallest(dist, n))
    add(BoundEntry("rychlik_min", f"mu_{{1:{n}}} <= sqrt(E X^2)/(sqrt 2 n)"),
        dist.dfr is True, "DFR flag not set" if dist.dfr is None else "law is not DFR",
        lambda: rychlik_min_bound(n, second), lambda: mean_smallest(dist, n))

    for e in report.entries:
        if e.applicable and e.satisfied is False:
            logger.warning(f"⚠ {dist.label}: {e.name} violated (slack {e.slack:.3e})")
    return report
