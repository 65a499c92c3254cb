#!/usr/bin/env python3
"""
Test the series constants, the individual bounds and the bound report.
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from analytics.bounds import (
    DFR_CE_FACTOR,
    ab_extreme_bound,
    ab_range_bound,
    c_of_n,
    ce_lower_dfr,
    check_all,
    complete_beta,
    constants,
    cre_upper_hdg,
    hdg_cre_tail,
    hdg_cre_terms,
    hdg_extreme_bound,
    range_bound,
    range_sum_tail,
    range_sum_terms,
    rychlik_condition,
    rychlik_delta,
    rychlik_min_bound,
    sum_upper,
    symmetric_cre_partial_sum,
)
from core.distributions import DistributionSpec, Law, build, table1_row
from core.exceptions import CapabilityError
from core.reference_values import HARTER_BOUND_SUM, HARTER_TOLERANCE
from utils.summation import compensated_sum

EXP1 = build("exp", **{"lambda": 1.0})
UNIFORM = build("uniform", a=1.0)

ENTRY_NAMES = [
    "cre_upper_hdg", "ce_lower_dfr", "cre_upper_symmetric_bounded", "cre_upper_symmetric",
    "sum_upper", "sum_upper_symmetric", "hdg_extreme", "range_extreme", "symmetric_extreme",
    "ab_extreme", "ab_range", "rychlik_min",
]


def test_constants():
    c = constants()
    assert c.hdg_cre == pytest.approx(1.210790, abs=1e-5)
    assert c.range_sum == pytest.approx(3.088656, abs=1e-5)
    assert c.hdg_cre == pytest.approx(1.21, abs=5e-3)
    assert c.range_sum == pytest.approx(3.09, abs=5e-3)
    assert c.symmetric_cre > HARTER_BOUND_SUM
    assert constants() is c


@pytest.mark.parametrize("terms, tail, constant", [
    (hdg_cre_terms, hdg_cre_tail, "hdg_cre"),
    (range_sum_terms, range_sum_tail, "range_sum"),
])
def test_tail_completes_partial_sum(terms, tail, constant):
    for m in (1, 10, 1000):
        partial = compensated_sum(terms(np.arange(1, m + 1, dtype=float)))
        assert partial + tail(m) == pytest.approx(getattr(constants(), constant), abs=1e-6)
    assert tail(10) > tail(100) > 0.0


def test_special_functions():
    assert complete_beta(1) == pytest.approx(1.0)
    assert complete_beta(2) == pytest.approx(1.0 / 6.0)
    assert c_of_n(1) == 0.0
    assert c_of_n(2) == pytest.approx(math.sqrt(1.0 / 3.0))
    # Exact and log-space branches agree
    ns = np.array([2.0, 30.0, 31.0, 200.0])
    assert c_of_n(ns) == pytest.approx([c_of_n(int(n)) for n in ns], rel=1e-12)
    with pytest.raises(ValueError):
        c_of_n(0)


def test_symmetric_partial_sum():
    assert symmetric_cre_partial_sum(1) == pytest.approx(1.0 / math.sqrt(12.0))
    assert symmetric_cre_partial_sum(99) == pytest.approx(HARTER_BOUND_SUM, abs=HARTER_TOLERANCE)


def test_symmetric_partial_sums_increase_towards_the_constant():
    partials = [symmetric_cre_partial_sum(m) for m in (1, 2, 5, 10, 50, 200)]
    assert all(b > a for a, b in zip(partials, partials[1:]))
    assert partials[-1] < constants().symmetric_cre


def test_rychlik_gate_on_the_minimum_always_holds():
    for n in range(1, 101):
        assert rychlik_delta(n, 1) == pytest.approx(1.0 / n)
        assert rychlik_condition(n, 1)


@pytest.mark.parametrize("n", [4, 5, 10, 50])
def test_rychlik_gate_on_the_maximum_fails_from_four(n):
    assert rychlik_delta(n, n) > 2.0
    assert not rychlik_condition(n, n)


def test_dfr_bound_holds_for_lomax_row():
    dfr = check_all(table1_row(4)).entry("ce_lower_dfr")
    assert dfr.applicable
    assert dfr.satisfied
    assert dfr.slack >= -1e-9


def test_extreme_bounds():
    assert hdg_extreme_bound(1, 0.5, 2.0) == 0.5
    assert hdg_extreme_bound(5, 1.0, 1.0) == pytest.approx(1.0 + 4.0 / 3.0)
    assert range_bound(8, 0.5) == pytest.approx(2.0)
    assert rychlik_min_bound(4, 2.0) == pytest.approx(0.25)
    # Arnold-Balakrishnan: range bound is twice the centred extreme bound
    assert ab_range_bound(6, 1.0) == pytest.approx(2.0 * (ab_extreme_bound(6, 0.0, 1.0)))
    with pytest.raises(ValueError):
        hdg_extreme_bound(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        cre_upper_hdg(-1.0)


def test_dfr_bound_is_exact_for_exponential():
    assert DFR_CE_FACTOR == pytest.approx(2.0 - math.pi ** 2 / 6.0)
    assert ce_lower_dfr(1.0, 2.0) == pytest.approx(math.pi ** 2 / 6.0 - 1.0, abs=1e-14)


def test_rychlik_delta():
    assert rychlik_delta(3, 1) == pytest.approx(1.0 / 3.0)
    assert rychlik_delta(3, 3) == pytest.approx(1.0 / 3.0 + 0.5 + 1.0)
    assert rychlik_condition(3, 3)
    assert not rychlik_condition(4, 4)
    with pytest.raises(ValueError):
        rychlik_delta(2, 3)


def test_report_for_exponential():
    report = check_all(EXP1)
    assert [e.name for e in report.entries] == ENTRY_NAMES
    assert report.all_satisfied
    assert not report.has_errors

    dfr = report.entry("ce_lower_dfr")
    assert dfr.applicable and dfr.direction == "lower"
    assert dfr.slack == pytest.approx(0.0, abs=1e-7)

    symmetric = report.entry("cre_upper_symmetric")
    assert not symmetric.applicable
    assert symmetric.reason == "symmetric_about not set"
    assert symmetric.bound_value is None


def test_report_for_uniform():
    report = check_all(UNIFORM)
    assert report.all_satisfied
    for name in ("cre_upper_symmetric_bounded", "cre_upper_symmetric", "sum_upper_symmetric",
                 "symmetric_extreme", "ab_extreme", "ab_range"):
        assert report.entry(name).applicable, name
        assert report.entry(name).satisfied, name
    assert report.entry("ce_lower_dfr").reason == "law is not DFR"


def test_report_for_table1_row4():
    report = check_all(table1_row(4))
    sigma = math.sqrt(0.75)
    hdg = report.entry("cre_upper_hdg")
    assert hdg.bound_value == pytest.approx(1.0479, abs=1e-3 + sigma * 5e-3)
    assert hdg.measured_value == pytest.approx(0.75, abs=1e-3)
    assert report.entry("sum_upper").bound_value == pytest.approx(sum_upper(sigma))
    assert report.measured["cre_plus_ce"] == pytest.approx(1.1115, abs=1e-3)


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 6])
def test_every_table1_row_satisfies_every_bound(row):
    report = check_all(table1_row(row))
    assert report.all_satisfied
    assert not report.has_errors
    assert len(report.entries) == len(ENTRY_NAMES)


def test_report_serialises():
    data = check_all(UNIFORM).to_dict()
    assert set(data) == {"distribution", "measured", "entries"}
    assert data["distribution"]["kind"] == "uniform"
    assert len(data["entries"]) == len(ENTRY_NAMES)


def test_negative_support_is_rejected():
    with pytest.raises(CapabilityError):
        check_all(build("normal"))



class OverflowingExponential(Law):
    """exp(1) whose cdf and survival function overflow beyond x = 30."""

    has_pdf = False
    has_closed_quantile = False

    def __init__(self, closed: bool):
        self.closed = closed

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def sf(self, x):
        if x > 30.0:
            raise OverflowError("math range error")
        return math.exp(-x)

    def closed_moments(self):
        return (1.0, 2.0, 24.0) if self.closed else None


def overflowing_spec(closed: bool) -> DistributionSpec:
    return DistributionSpec(kind="overflowing_exp", params=(("closed", float(closed)),),
                            support=(0.0, math.inf), law=OverflowingExponential(closed))


def test_report_records_integrand_overflow_per_entry():
    report = check_all(overflowing_spec(closed=True))
    assert len(report.entries) == len(ENTRY_NAMES)
    assert report.has_errors
    assert report.measured["mean"] == 1.0
    assert report.measured["cre"] is None
    for e in report.entries:
        if e.applicable:
            assert "integrand failed" in e.error, e.name


def test_report_records_moment_failure_per_entry():
    report = check_all(overflowing_spec(closed=False))
    assert len(report.entries) == len(ENTRY_NAMES)
    assert "mean" not in report.measured
    assert any(w.startswith("moments:") for w in report.warnings)
    for e in report.entries:
        if e.applicable:
            assert e.error is not None, e.name


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
