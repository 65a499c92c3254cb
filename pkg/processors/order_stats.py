"""
Moments of Extreme Order Statistics

Computes mu_{n:n}, mu_{1:n} and their second moments for any parent law:

- closed forms for the exponential and uniform catalog laws,
- survival-form quadrature for other non-negative laws,
      E X_{n:n}^r = integral r x^{r-1} (1 - F^n) dx,  E X_{1:n}^r = integral r x^{r-1} F̄^n dx,
  which needs no density (exact step sums for empirical laws),
- probability-domain quadrature n integral Q(p)^r p^{n-1} dp for laws with
  negative support (the standard normal of the Harter comparison).

Results are memoised per (distribution, rank, n, order, tolerance). A Monte Carlo
oracle samples extremes by inverse transform, X_{n:n} = Q(U^{1/n}).
"""

import math
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import special

from config.settings import Config
from core.distributions import DistributionSpec, cdf, moments, quantile, sf
from core.exceptions import DegenerateLawError, IntegrationError
from core.quadrature import DEFAULT_TOLERANCE, Tolerance, integrate
from utils.logging_config import get_logger

logger = get_logger("processors.order_stats")

SMALLEST = "smallest"
LARGEST = "largest"
EXTREMES = (SMALLEST, LARGEST)


@dataclass(frozen=True)
class MomentRecord:
    """Cached moment of an extreme order statistic."""

    k: int
    n: int
    order: int
    value: float
    method: str


@dataclass(frozen=True)
class StandardizedMoment:
    """E(Z_{n:n}) = (mu_{n:n} - mu) / sigma."""

    n: int
    value: float


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    samples: int
    seed: int


@dataclass(frozen=True)
class HarterComparison:
    m: int
    series_sum: float
    bound_sum: float

    @property
    def holds(self) -> bool:
        return self.series_sum < self.bound_sum


# ==================== CLOSED FORMS ====================

def _harmonic(n: np.ndarray) -> np.ndarray:
    return special.digamma(n + 1.0) + np.euler_gamma


def _harmonic2(n: np.ndarray) -> np.ndarray:
    return math.pi ** 2 / 6.0 - special.polygamma(1, n + 1.0)


def _exp_closed(params: Dict[str, float], which: str, n: np.ndarray, order: int) -> np.ndarray:
    lam = params["lambda"]
    if which == LARGEST:
        h = _harmonic(n)
        return h / lam if order == 1 else (h * h + _harmonic2(n)) / lam ** 2
    return 1.0 / (n * lam) if order == 1 else 2.0 / (n * lam) ** 2


def _uniform_closed(params: Dict[str, float], which: str, n: np.ndarray, order: int) -> np.ndarray:
    a = params["a"]
    if which == LARGEST:
        return a * n / (n + 1.0) if order == 1 else a * a * n / (n + 2.0)
    return a / (n + 1.0) if order == 1 else 2.0 * a * a / ((n + 1.0) * (n + 2.0))


CLOSED_FORMS: Dict[str, Callable[[Dict[str, float], str, np.ndarray, int], np.ndarray]] = {
    "exp": _exp_closed,
    "uniform": _uniform_closed,
}


# ==================== CACHE ====================

class _MomentCache:
    """Bounded LRU memo of MomentRecords; all access is locked, identical values overwrite."""

    def __init__(self, maxsize: int = Config.MOMENT_CACHE_SIZE):
        self._data: "OrderedDict[Tuple, MomentRecord]" = OrderedDict()
        self._lock = threading.Lock()
        self.maxsize = maxsize
        self.enabled = True

    def get(self, key) -> Optional[MomentRecord]:
        if not self.enabled:
            return None
        with self._lock:
            record = self._data.get(key)
            if record is not None:
                self._data.move_to_end(key)
            return record

    def put(self, key, record: MomentRecord):
        if not self.enabled:
            return
        with self._lock:
            self._data[key] = record
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


MOMENT_CACHE = _MomentCache()


def set_cache_enabled(enabled: bool):
    """Toggle memoisation (results are identical either way)."""
    MOMENT_CACHE.enabled = enabled


# ==================== QUADRATURE ROUTES ====================

def _one_minus_cdf_power(dist: DistributionSpec, x: float, n: int) -> float:
    """1 - F(x)^n without cancellation when F is close to 1."""
    F = cdf(dist, x)
    if F > 0.5:
        return -math.expm1(n * math.log1p(-sf(dist, x)))
    return 1.0 - F ** n


def _empirical_moment(dist: DistributionSpec, which: str, n: int, order: int) -> float:
    """Exact survival-form moment for a step cdf."""
    values, levels = dist.law.step_points()
    edges = np.concatenate(([0.0], values))
    # cdf level on [edges[i], edges[i+1]) is 0 before the first value, then levels[i-1]
    level_on_segment = np.concatenate(([0.0], levels[:-1]))
    if which == LARGEST:
        tail = 1.0 - level_on_segment ** n
    else:
        tail = (1.0 - level_on_segment) ** n
    widths = edges[1:] ** order - edges[:-1] ** order
    return float(math.fsum((widths * tail).tolist()))


def _survival_moment(dist: DistributionSpec, which: str, n: int, order: int, tol: Tolerance) -> float:
    if which == LARGEST:
        def integrand(x):
            return order * x ** (order - 1) * _one_minus_cdf_power(dist, x, n)
    else:
        def integrand(x):
            return order * x ** (order - 1) * sf(dist, x) ** n

    lower, upper = dist.support
    result = integrate(integrand, lower, upper, tol)
    if not result.converged:
        raise IntegrationError(
            f"{dist.label}: moment of X_{{{'1' if which == SMALLEST else n}:{n}}} of order {order} "
            f"did not converge ({result.message})", result)
    return lower ** order + result.value if lower > 0 else result.value


def _probability_domain_moment(dist: DistributionSpec, which: str, n: int, order: int,
                               tol: Tolerance) -> float:
    """n integral_0^1 Q(p)^r w(p) dp with w = p^{n-1} (largest) or (1-p)^{n-1} (smallest)."""
    if which == LARGEST:
        def integrand(p):
            return n * quantile(dist, p) ** order * math.exp((n - 1) * math.log(p))
    else:
        def integrand(p):
            return n * quantile(dist, p) ** order * math.exp((n - 1) * math.log1p(-p))

    result = integrate(integrand, 0.0, 1.0, tol)
    if not result.converged:
        raise IntegrationError(f"{dist.label}: probability-domain extreme moment (n={n}) did not converge",
                               result)
    return result.value


# ==================== PUBLIC API ====================

def extreme_moment(dist: DistributionSpec, which: str, n: int, order: int = 1,
                   tol: Tolerance = DEFAULT_TOLERANCE) -> MomentRecord:
    """
    Moment of order 1 or 2 of X_{1:n} (which="smallest") or X_{n:n} ("largest").

    Raises:
        ValueError: n < 1, order not in {1, 2} or unknown extreme
        IntegrationError: quadrature failure
    """
    if which not in EXTREMES:
        raise ValueError(f"which must be one of {EXTREMES}, got {which!r}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if order not in (1, 2):
        raise ValueError(f"moment order must be 1 or 2, got {order}")

    k = 1 if which == SMALLEST else n
    key = (dist, which, n, order, tol)
    cached = MOMENT_CACHE.get(key)
    if cached is not None:
        return cached

    closed = CLOSED_FORMS.get(dist.kind)
    if closed is not None:
        value = float(closed(dist.param_dict, which, np.array([float(n)]), order)[0])
        method = "closed_form"
    elif n == 1:
        pair = moments(dist)
        value = pair.mean if order == 1 else pair.second_moment
        method = "closed_form" if pair.method == "closed_form" else "quadrature"
    elif dist.is_empirical:
        value = _empirical_moment(dist, which, n, order)
        method = "closed_form"
    elif dist.non_negative:
        value = _survival_moment(dist, which, n, order, tol)
        method = "quadrature"
    else:
        value = _probability_domain_moment(dist, which, n, order, tol)
        method = "quadrature"

    record = MomentRecord(k=k, n=n, order=order, value=value, method=method)
    MOMENT_CACHE.put(key, record)
    return record


def moment_sequence(dist: DistributionSpec, which: str, order: int, ns: np.ndarray) -> np.ndarray:
    """Vector of extreme moments for sample sizes ns (vectorised for closed forms)."""
    ns = np.asarray(ns, dtype=float)
    closed = CLOSED_FORMS.get(dist.kind)
    if closed is not None:
        return np.asarray(closed(dist.param_dict, which, ns, order), dtype=float)
    return np.array([extreme_moment(dist, which, int(n), order).value for n in ns], dtype=float)


def mean_largest(dist: DistributionSpec, n: int) -> float:
    """mu_{n:n} = E(X_{n:n})."""
    return extreme_moment(dist, LARGEST, n, 1).value


def mean_smallest(dist: DistributionSpec, n: int) -> float:
    """mu_{1:n} = E(X_{1:n})."""
    return extreme_moment(dist, SMALLEST, n, 1).value


def second_moment_extreme(dist: DistributionSpec, which: str, n: int) -> float:
    """mu^{(2)}_{1:n} or mu^{(2)}_{n:n}."""
    return extreme_moment(dist, which, n, 2).value


def standardized_mean_largest(dist: DistributionSpec, n: int) -> StandardizedMoment:
    """
    E(Z_{n:n}) for Z = (X - mu) / sigma.

    Raises:
        DegenerateLawError: sigma = 0
    """
    pair = moments(dist)
    if pair.sigma == 0.0:
        raise DegenerateLawError(f"{dist.label} has zero variance; cannot standardise")
    return StandardizedMoment(n=n, value=(mean_largest(dist, n) - pair.mean) / pair.sigma)


# ==================== MONTE CARLO ====================

def _extreme_draws(dist: DistributionSpec, which: str, n: int, u: np.ndarray) -> np.ndarray:
    """Inverse-transform draws of X_{n:n} or X_{1:n} from uniforms u."""
    if which == LARGEST:
        p = np.exp(np.log(u) / n)
    else:
        p = -np.expm1(np.log1p(-u) / n)
    p = np.clip(p, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    q = np.vectorize(dist.law.quantile, otypes=[float])
    return q(p)


def _chunk_sums(dist, which, n, order, size, seed_seq) -> Tuple[float, float]:
    rng = np.random.default_rng(seed_seq)
    x = _extreme_draws(dist, which, n, rng.random(size)) ** order
    return math.fsum(x.tolist()), math.fsum((x * x).tolist())


def mc_extreme_estimate(dist: DistributionSpec, which: str, n: int, order: int = 1,
                        samples: int = Config.MC_DEFAULT_SAMPLES, seed: int = Config.MC_DEFAULT_SEED,
                        workers: int = 1) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of an extreme moment with its standard error.

    Draws are split into fixed-size chunks, each fed by its own stream spawned
    from SeedSequence(seed), and reduced in chunk order; the result therefore
    does not depend on `workers`.

    Raises:
        ValueError: samples < 1 or n < 1
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if which not in EXTREMES:
        raise ValueError(f"which must be one of {EXTREMES}, got {which!r}")

    jobs = _chunk_plan(samples, seed)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            sums = list(executor.map(lambda job: _chunk_sums(dist, which, n, order, *job), jobs))
    else:
        sums = [_chunk_sums(dist, which, n, order, *job) for job in jobs]

    total = math.fsum(s for s, _ in sums)
    total_sq = math.fsum(s2 for _, s2 in sums)
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return MonteCarloEstimate(value=mean, std_error=math.sqrt(variance / samples), samples=samples, seed=seed)


def mc_extreme_moment(dist: DistributionSpec, which: str, n: int, order: int = 1,
                      samples: int = Config.MC_DEFAULT_SAMPLES, seed: int = Config.MC_DEFAULT_SEED,
                      workers: int = 1) -> float:
    """Monte Carlo point estimate of an extreme moment (deterministic for a fixed seed)."""
    return mc_extreme_estimate(dist, which, n, order, samples, seed, workers).value


def sample_parent(dist: DistributionSpec, samples: int, seed: int) -> np.ndarray:
    """Inverse-transform draws of the parent law, chunked like the oracle."""
    return np.concatenate([
        _extreme_draws(dist, LARGEST, 1, np.random.default_rng(stream).random(size))
        for size, stream in _chunk_plan(samples, seed)
    ])


def _chunk_plan(samples: int, seed: int):
    chunk = Config.MC_CHUNK_SIZE
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    return list(zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))))


# ==================== HARTER ====================

def harter_comparison(m: int = Config.HARTER_DEFAULT_M) -> HarterComparison:
    """
    Standard normal check of the symmetric CRE bound with m terms.

    series_sum = sum_{n=1}^m mu_{n+1:n+1} / (n(n+1)) with normal extreme means
    computed by quadrature; bound_sum = (1/sqrt 2) sum_{n=1}^m (1/n)
    sqrt(1/(2n+1) - B(n+1, n+1)).

    Raises:
        ValueError: m < 1
        IntegrationError: quadrature failure on a normal extreme mean
    """
    from analytics.bounds import symmetric_cre_terms
    from core.distributions import build
    from utils.summation import compensated_sum

    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")

    normal = build("normal")
    ns = np.arange(1, m + 1, dtype=float)
    largest = moment_sequence(normal, LARGEST, 1, ns + 1.0)
    series_sum = compensated_sum(largest / (ns * (ns + 1.0)))
    bound_sum = compensated_sum(symmetric_cre_terms(ns)) / math.sqrt(2.0)

    comparison = HarterComparison(m=m, series_sum=series_sum, bound_sum=bound_sum)
    if not comparison.holds:
        logger.warning(f"⚠ Harter comparison violated at m={m}: {series_sum:.6f} >= {bound_sum:.6f}")
    return comparison
