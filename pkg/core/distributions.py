"""
Parent distributions.

A DistributionSpec is an immutable description of a non-negative parent law
(kind, parameters, support and the symmetry / DFR metadata that gates the
bounds) bound to a Law object that evaluates cdf, survival function, pdf and
quantile. The catalog covers every distribution of Table 1 plus the standard
normal used for the Harter comparison.
"""

import hashlib
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special

from config.settings import Config
from core.exceptions import (
    CapabilityError,
    DomainError,
    IngestionError,
    InvalidParameterError,
    MomentUndefinedError,
    SpecParseError,
)
from utils.logging_config import get_logger

logger = get_logger("core.distributions")


# ==================== LAWS ====================

class Law(ABC):
    """Evaluation side of a parent distribution."""

    lower: float = 0.0
    upper: float = math.inf
    has_pdf: bool = True
    has_closed_quantile: bool = True

    @abstractmethod
    def cdf(self, x: float) -> float:
        """F(x) for x inside the support."""

    def sf(self, x: float) -> float:
        """Survival function 1 - F(x); overridden where 1 - F cancels."""
        return 1.0 - self.cdf(x)

    def pdf(self, x: float) -> float:
        raise CapabilityError(f"{type(self).__name__} has no density")

    def quantile(self, p: float) -> float:
        return _bracketed_quantile(self, p)

    def closed_moments(self) -> Optional[Tuple[float, float, Optional[float]]]:
        """(E X, E X^2, E X^4) when known in closed form, else None."""
        return None


def _bracketed_quantile(law: Law, p: float) -> float:
    """Inverse cdf by bracketed root finding (Brent) to Config.QUANTILE_XTOL."""
    lo = law.lower
    hi = law.upper
    if math.isinf(hi):
        hi = max(1.0, lo + 1.0)
        while law.cdf(hi) < p:
            hi *= 2.0
            if hi > 1e300:
                raise DomainError(f"cannot bracket quantile at p={p}")
    return optimize.brentq(lambda x: law.cdf(x) - p, lo, hi,
                           xtol=Config.QUANTILE_XTOL, rtol=4 * np.finfo(float).eps,
                           maxiter=Config.QUANTILE_MAXITER)


class ExponentialLaw(Law):
    def __init__(self, lam: float):
        self.lam = lam

    def cdf(self, x):
        return -math.expm1(-self.lam * x)

    def sf(self, x):
        return math.exp(-self.lam * x)

    def pdf(self, x):
        return self.lam * math.exp(-self.lam * x)

    def quantile(self, p):
        return -math.log1p(-p) / self.lam

    def closed_moments(self):
        lam = self.lam
        return 1.0 / lam, 2.0 / lam ** 2, 24.0 / lam ** 4


class UniformLaw(Law):
    def __init__(self, a: float):
        self.a = a
        self.upper = a

    def cdf(self, x):
        return x / self.a

    def pdf(self, x):
        return 1.0 / self.a

    def quantile(self, p):
        return self.a * p

    def closed_moments(self):
        a = self.a
        return a / 2.0, a * a / 3.0, a ** 4 / 5.0


class PowerLaw(Law):
    """F(x) = x^k on (0, 1)."""

    def __init__(self, k: float):
        self.k = k
        self.upper = 1.0

    def cdf(self, x):
        return x ** self.k

    def sf(self, x):
        return -math.expm1(self.k * math.log(x)) if x > 0 else 1.0

    def pdf(self, x):
        return self.k * x ** (self.k - 1.0)

    def quantile(self, p):
        return p ** (1.0 / self.k)

    def closed_moments(self):
        k = self.k
        return k / (k + 1.0), k / (k + 2.0), k / (k + 4.0)


class InverseSquareExpLaw(Law):
    """Table 1 row 3: F(x) = x^{-2} exp(2(1 - 1/x)) on (0, 1)."""

    has_closed_quantile = False

    def __init__(self):
        self.upper = 1.0

    @staticmethod
    def _log_cdf(x):
        return 2.0 - 2.0 / x - 2.0 * math.log(x)

    def cdf(self, x):
        if x <= 0.0:
            return 0.0
        return math.exp(self._log_cdf(x))

    def sf(self, x):
        if x <= 0.0:
            return 1.0
        return -math.expm1(self._log_cdf(x))

    def pdf(self, x):
        if x <= 0.0:
            return 0.0
        return 2.0 * (1.0 - x) / x ** 2 * math.exp(self._log_cdf(x))


class LomaxLaw(Law):
    """Table 1 row 4: F(x) = 1 - (x + 1)^{-alpha}, alpha = 3."""

    def __init__(self, alpha: float = 3.0):
        self.alpha = alpha

    def cdf(self, x):
        return -math.expm1(-self.alpha * math.log1p(x))

    def sf(self, x):
        return math.exp(-self.alpha * math.log1p(x))

    def pdf(self, x):
        return self.alpha * math.exp(-(self.alpha + 1.0) * math.log1p(x))

    def quantile(self, p):
        return math.expm1(-math.log1p(-p) / self.alpha)

    def closed_moments(self):
        a = self.alpha
        mean = 1.0 / (a - 1.0) if a > 1 else math.inf
        second = 2.0 / ((a - 1.0) * (a - 2.0)) if a > 2 else math.inf
        fourth = 24.0 / ((a - 1.0) * (a - 2.0) * (a - 3.0) * (a - 4.0)) if a > 4 else None
        return mean, second, fourth


class ExpReciprocalLaw(Law):
    """Table 1 row 6: F(x) = exp(-1 / (e^x - 1)) on (0, inf)."""

    @staticmethod
    def _rate(x):
        # 1 / (e^x - 1) = e^{-x} / (1 - e^{-x}); finite for every x > 0
        return math.exp(-x) / -math.expm1(-x)

    def cdf(self, x):
        if x <= 0.0:
            return 0.0
        return math.exp(-self._rate(x))

    def sf(self, x):
        if x <= 0.0:
            return 1.0
        return -math.expm1(-self._rate(x))

    def pdf(self, x):
        if x <= 0.0:
            return 0.0
        f = self.cdf(x)
        if f == 0.0:
            return 0.0
        # e^x / (e^x - 1)^2 written without overflow
        return f * math.exp(-x) / math.expm1(-x) ** 2

    def quantile(self, p):
        return math.log1p(-1.0 / math.log(p))


class StandardNormalLaw(Law):
    lower = -math.inf

    def cdf(self, x):
        return float(special.ndtr(x))

    def sf(self, x):
        return float(special.ndtr(-x))

    def pdf(self, x):
        return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    def quantile(self, p):
        return float(special.ndtri(p))

    def closed_moments(self):
        return 0.0, 1.0, 3.0


class ScaledLaw(Law):
    """Law of a * X for a base law X."""

    def __init__(self, base: Law, a: float):
        self.base = base
        self.a = a
        self.lower = base.lower * a
        self.upper = base.upper * a
        self.has_pdf = base.has_pdf
        self.has_closed_quantile = base.has_closed_quantile

    def cdf(self, x):
        return self.base.cdf(x / self.a)

    def sf(self, x):
        return self.base.sf(x / self.a)

    def pdf(self, x):
        return self.base.pdf(x / self.a) / self.a

    def quantile(self, p):
        return self.a * self.base.quantile(p)

    def closed_moments(self):
        base = self.base.closed_moments()
        if base is None:
            return None
        mean, second, fourth = base
        return (self.a * mean, self.a ** 2 * second,
                None if fourth is None else self.a ** 4 * fourth)


class EmpiricalLaw(Law):
    """Right-continuous step cdf of a sample; no density."""

    has_pdf = False

    def __init__(self, samples: np.ndarray):
        self.samples = np.sort(np.asarray(samples, dtype=float))
        self.size = len(self.samples)
        self.upper = float(self.samples[-1])

    def cdf(self, x):
        return float(np.searchsorted(self.samples, x, side="right")) / self.size

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def pdf(self, x):
        raise CapabilityError("empirical distributions carry no density; use a survival-function route")

    def quantile(self, p):
        index = max(int(math.ceil(p * self.size)) - 1, 0)
        return float(self.samples[index])

    def closed_moments(self):
        s = self.samples
        return float(np.mean(s)), float(np.mean(s ** 2)), float(np.mean(s ** 4))

    def step_points(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct sample values and the cdf level reached at each."""
        values, counts = np.unique(self.samples, return_counts=True)
        return values, np.cumsum(counts) / self.size


# ==================== SPEC ====================

@dataclass(frozen=True)
class DistributionSpec:
    """Immutable parent-distribution description; safe to share across threads."""

    kind: str
    params: Tuple[Tuple[str, float], ...]
    support: Tuple[float, float]
    symmetric_about: Optional[float] = None
    dfr: Optional[bool] = None
    bounded_support: bool = False
    fingerprint: str = ""
    law: Law = field(default=None, compare=False, hash=False, repr=False)

    @property
    def param_dict(self) -> Dict[str, float]:
        return dict(self.params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.kind}({inner})"

    @property
    def is_empirical(self) -> bool:
        return isinstance(self.law, EmpiricalLaw)

    @property
    def has_pdf(self) -> bool:
        return self.law.has_pdf

    @property
    def non_negative(self) -> bool:
        return self.support[0] >= 0.0

    def cdf(self, x: float) -> float:
        return cdf(self, x)

    def sf(self, x: float) -> float:
        return sf(self, x)

    def pdf(self, x: float) -> float:
        return pdf(self, x)

    def quantile(self, p: float) -> float:
        return quantile(self, p)

    def summary(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "label": self.label,
            "support": [self.support[0], self.support[1]],
            "symmetric_about": self.symmetric_about,
            "dfr": self.dfr,
            "bounded_support": self.bounded_support,
        }


@dataclass(frozen=True)
class MomentPair:
    """First two moments of a parent law (plus the fourth when finite)."""

    mean: float
    second_moment: float
    variance: float
    fourth_moment: Optional[float] = None
    method: str = "closed_form"
    error_estimate: float = 0.0

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.variance, 0.0))


# ==================== OPERATIONS ====================

def cdf(dist: DistributionSpec, x: float) -> float:
    """F(x), clamped to 0 / 1 outside the support."""
    lower, upper = dist.support
    if x < lower:
        return 0.0
    if x >= upper:
        return 1.0
    return min(max(dist.law.cdf(x), 0.0), 1.0)


def sf(dist: DistributionSpec, x: float) -> float:
    """Survival function F̄(x), clamped outside the support."""
    lower, upper = dist.support
    if x < lower:
        return 1.0
    if x >= upper:
        return 0.0
    return min(max(dist.law.sf(x), 0.0), 1.0)


def pdf(dist: DistributionSpec, x: float) -> float:
    """Density; zero outside the support. CapabilityError for empirical laws."""
    if not dist.has_pdf:
        raise CapabilityError(f"{dist.label} has no density")
    lower, upper = dist.support
    if x <= lower or x >= upper:
        return 0.0
    return dist.law.pdf(x)


def quantile(dist: DistributionSpec, p: float) -> float:
    """
    Inverse cdf on (0, 1).

    Raises:
        DomainError: p outside (0, 1)
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile probability {p!r} outside (0, 1)")
    return dist.law.quantile(p)


@lru_cache(maxsize=256)
def moments(dist: DistributionSpec) -> MomentPair:
    """
    Mean, second moment and variance (plus fourth moment when finite).

    Closed forms are used when the catalog has them; otherwise the survival
    integrals E X^r = integral r x^{r-1} F̄(x) dx are evaluated.

    Raises:
        MomentUndefinedError: the mean or second-moment integral diverges
    """
    closed = dist.law.closed_moments()
    if closed is not None and math.isfinite(closed[0]) and math.isfinite(closed[1]):
        mean, second, fourth = closed
        return MomentPair(mean, second, max(second - mean * mean, 0.0), fourth)
    if closed is not None:
        order = 1 if not math.isfinite(closed[0]) else 2
        raise MomentUndefinedError(f"{dist.label}: moment of order {order} is infinite")

    if not dist.non_negative:
        raise MomentUndefinedError(f"{dist.label}: no closed-form moments for a law with negative support")

    from core.quadrature import integrate

    lower, upper = dist.support
    results = {}
    for order in (1, 2, 4):
        res = integrate(lambda x, r=order: r * x ** (r - 1) * sf(dist, x), lower, upper)
        if not res.converged:
            if order == 4:
                logger.debug("%s: fourth moment treated as divergent", dist.label)
                results[order] = None
                continue
            raise MomentUndefinedError(
                f"{dist.label}: moment of order {order} undefined (quadrature did not converge, "
                f"best estimate {res.value:.6g})")
        results[order] = res

    mean, second = results[1].value, results[2].value
    fourth = results[4].value if results[4] is not None else None
    error = results[1].abs_error_estimate + results[2].abs_error_estimate
    return MomentPair(mean, second, max(second - mean * mean, 0.0), fourth, "quadrature", error)


@lru_cache(maxsize=256)
def first_moment(dist: DistributionSpec) -> float:
    """
    E X alone, for laws whose variance may be infinite.

    Raises:
        MomentUndefinedError: the mean diverges
    """
    closed = dist.law.closed_moments()
    if closed is not None and math.isfinite(closed[0]):
        return closed[0]
    if not dist.non_negative:
        raise MomentUndefinedError(f"{dist.label}: no closed-form mean for a law with negative support")

    from core.quadrature import integrate

    lower, upper = dist.support
    res = integrate(lambda x: sf(dist, x), lower, upper)
    if not res.converged:
        raise MomentUndefinedError(
            f"{dist.label}: mean undefined (quadrature did not converge, best estimate {res.value:.6g})")
    return res.value


# ==================== CATALOG ====================

@dataclass(frozen=True)
class CatalogEntry:
    kind: str
    required: Tuple[str, ...]
    factory: Callable[[Dict[str, float]], Tuple[Law, Tuple[float, float]]]
    validate: Callable[[Dict[str, float]], None]
    symmetric: bool = False
    dfr: Optional[bool] = None
    bounded: bool = False
    description: str = ""


def _positive(*names):
    def check(params):
        for name in names:
            if not params[name] > 0:
                raise InvalidParameterError(f"parameter {name} must be > 0, got {params[name]!r}")
    return check


def _no_check(params):
    return None


def _exp_factory(p):
    return ExponentialLaw(p["lambda"]), (0.0, math.inf)


def _uniform_factory(p):
    return UniformLaw(p["a"]), (0.0, p["a"])


def _power_factory(p):
    return PowerLaw(p["k"]), (0.0, 1.0)


CATALOG: Dict[str, CatalogEntry] = {
    "exp": CatalogEntry("exp", ("lambda",), _exp_factory, _positive("lambda"),
                        dfr=True, description="1 - exp(-lambda x), x > 0"),
    "uniform": CatalogEntry("uniform", ("a",), _uniform_factory, _positive("a"),
                            symmetric=True, dfr=False, bounded=True, description="x / a, 0 < x < a"),
    "table1:row3": CatalogEntry("table1:row3", (), lambda p: (InverseSquareExpLaw(), (0.0, 1.0)), _no_check,
                                bounded=True, description="x^-2 exp(2(1 - 1/x)), 0 < x < 1"),
    "table1:row4": CatalogEntry("table1:row4", (), lambda p: (LomaxLaw(3.0), (0.0, math.inf)), _no_check,
                                dfr=True, description="1 - (x + 1)^-3, x > 0"),
    "power": CatalogEntry("power", ("k",), _power_factory, _positive("k"),
                          dfr=False, bounded=True, description="x^k, 0 < x < 1"),
    "table1:row6": CatalogEntry("table1:row6", (), lambda p: (ExpReciprocalLaw(), (0.0, math.inf)), _no_check,
                                description="exp(-1 / (e^x - 1)), x > 0"),
    "normal": CatalogEntry("normal", (), lambda p: (StandardNormalLaw(), (-math.inf, math.inf)), _no_check,
                           description="standard normal (order-statistic means only)"),
}

# table1:rowN aliases resolved to catalog kinds with fixed parameters
TABLE1_ALIASES: Dict[str, Tuple[str, Dict[str, float]]] = {
    "table1:row1": ("exp", {"lambda": 1.0}),
    "table1:row2": ("uniform", {"a": 1.0}),
    "table1:row3": ("table1:row3", {}),
    "table1:row4": ("table1:row4", {}),
    "table1:row5": ("power", {"k": 2.0}),
    "table1:row6": ("table1:row6", {}),
}


def build(kind: str, **params: float) -> DistributionSpec:
    """
    Construct a catalog distribution.

    Raises:
        SpecParseError: unknown kind or wrong parameter names
        InvalidParameterError: parameter values out of range
    """
    if kind in TABLE1_ALIASES and kind not in CATALOG:
        base_kind, fixed = TABLE1_ALIASES[kind]
        return build(base_kind, **{**fixed, **params})
    entry = CATALOG.get(kind)
    if entry is None:
        raise SpecParseError(f"unknown distribution kind '{kind}'", 0)

    unknown = sorted(set(params) - set(entry.required))
    if unknown:
        raise SpecParseError(f"unknown parameter(s) {', '.join(unknown)} for '{kind}'", 0)
    missing = [name for name in entry.required if name not in params]
    if missing:
        raise SpecParseError(f"missing parameter(s) {', '.join(missing)} for '{kind}'", 0)

    values = {name: float(params[name]) for name in entry.required}
    entry.validate(values)
    law, support = entry.factory(values)
    symmetric_about = (support[0] + support[1]) / 2.0 if entry.symmetric else None
    return DistributionSpec(
        kind=kind,
        params=tuple((name, values[name]) for name in entry.required),
        support=support,
        symmetric_about=symmetric_about,
        dfr=entry.dfr,
        bounded_support=entry.bounded,
        law=law,
    )


def table1_row(row: int) -> DistributionSpec:
    """Distribution of Table 1 row 1..6 (lambda = 1, a = 1, k = 2)."""
    key = f"table1:row{row}"
    if key not in TABLE1_ALIASES:
        raise SpecParseError(f"Table 1 has rows 1..6, got {row}", 0)
    return build(key)


def table1_rows() -> List[DistributionSpec]:
    return [table1_row(row) for row in range(1, 7)]


def scaled(dist: DistributionSpec, a: float) -> DistributionSpec:
    """
    Law of a * X.

    exp and uniform are re-parametrised; other laws are wrapped and keep
    their metadata with rescaled support.
    """
    if not a > 0:
        raise InvalidParameterError(f"scale factor must be > 0, got {a!r}")
    if dist.kind == "exp":
        return build("exp", **{"lambda": dist.param_dict["lambda"] / a})
    if dist.kind == "uniform":
        return build("uniform", a=dist.param_dict["a"] * a)
    lower, upper = dist.support
    return DistributionSpec(
        kind=f"scaled:{dist.kind}",
        params=dist.params + (("scale", float(a)),),
        support=(lower * a, upper * a),
        symmetric_about=None if dist.symmetric_about is None else dist.symmetric_about * a,
        dfr=dist.dfr,
        bounded_support=dist.bounded_support,
        fingerprint=dist.fingerprint,
        law=ScaledLaw(dist.law, a),
    )


# ==================== PARSER ====================

class _SpecParser:
    """Recursive-descent parser for `kind(name=value, ...)`."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise SpecParseError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def identifier(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_:"):
            self.pos += 1
        if start == self.pos:
            self.error("expected identifier")
        return self.text[start:self.pos]

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "+-."):
            self.pos += 1
        token = self.text[start:self.pos]
        try:
            return float(token)
        except ValueError:
            self.pos = start
            self.error(f"invalid number '{token}'")

    def expect(self, char: str):
        self.skip_ws()
        if self.peek() != char:
            self.error(f"expected '{char}'")
        self.pos += 1

    def parse(self) -> Tuple[str, Dict[str, float], int]:
        kind = self.identifier()
        kind_pos = 0
        params: Dict[str, float] = {}
        self.skip_ws()
        if self.peek() == "(":
            self.pos += 1
            self.skip_ws()
            if self.peek() != ")":
                while True:
                    name_pos = self.pos
                    name = self.identifier()
                    if name in params:
                        self.pos = name_pos
                        self.error(f"duplicate parameter '{name}'")
                    self.expect("=")
                    params[name] = self.number()
                    self.skip_ws()
                    if self.peek() == ",":
                        self.pos += 1
                        continue
                    break
            self.expect(")")
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("unexpected trailing text")
        return kind, params, kind_pos


def parse_spec(text: str) -> DistributionSpec:
    """
    Parse the spec mini-language: `kind(name=value, ...)` or `table1:rowN`.

    Raises:
        SpecParseError: syntax errors, unknown kinds or parameters (with position)
        InvalidParameterError: invalid parameter values
    """
    parser = _SpecParser(text.strip())
    kind, params, kind_pos = parser.parse()
    if kind not in CATALOG and kind not in TABLE1_ALIASES:
        raise SpecParseError(f"unknown distribution kind '{kind}'", kind_pos)
    if kind in TABLE1_ALIASES and params:
        raise SpecParseError(f"'{kind}' takes no parameters", len(kind))
    try:
        return build(kind, **params)
    except SpecParseError as exc:
        # Re-anchor parameter errors just after the kind
        raise SpecParseError(str(exc).rsplit(" (at position", 1)[0], len(kind)) from None


# ==================== EMPIRICAL ====================

def empirical_from_samples(data: Iterable[float]) -> DistributionSpec:
    """
    Empirical (step-cdf) distribution of non-negative samples.

    Raises:
        IngestionError: empty data, non-finite or negative values
    """
    samples = np.asarray(list(data), dtype=float)
    if samples.size == 0:
        raise IngestionError("no samples supplied")
    if not np.all(np.isfinite(samples)):
        raise IngestionError("samples must be finite")
    if np.any(samples < 0):
        bad = float(samples[samples < 0][0])
        raise IngestionError(f"negative sample value {bad!r}; data must be non-negative")

    law = EmpiricalLaw(samples)
    digest = hashlib.md5(law.samples.tobytes()).hexdigest()[:16]
    return DistributionSpec(
        kind="empirical",
        params=(("n", float(law.size)),),
        support=(0.0, law.upper),
        symmetric_about=None,
        dfr=None,
        bounded_support=True,
        fingerprint=digest,
        law=law,
    )


def parse_sample_lines(lines: Sequence[str]) -> List[float]:
    """
    Parse sample-file lines: one decimal per line, '#' comments and blanks skipped.

    Raises:
        IngestionError: unparsable or negative value (with 1-based line number)
    """
    values = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = float(line)
        except ValueError:
            raise IngestionError(f"line {lineno}: cannot parse '{line}' as a number") from None
        if value < 0 or not math.isfinite(value):
            raise IngestionError(f"line {lineno}: value {line} must be a finite non-negative number")
        values.append(value)
    return values
