#!/usr/bin/env python3
"""
Test the order-statistic series, their certified brackets and the adaptive
truncation search.
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from core.distributions import DistributionSpec, LomaxLaw, build, empirical_from_samples, table1_row
from core.exceptions import CapabilityError, MomentUndefinedError
from processors.entropies import EntropyKind, entropy
from processors.series import (
    SUM_IDENTITY,
    ce_series,
    converge,
    cre_series,
    series,
    sum_identity,
    tail_majorant,
    telescoped_partial_sum,
    wce_series,
    wcre_series,
)

EXP1 = build("exp", **{"lambda": 1.0})
UNIFORM = build("uniform", a=1.0)


def test_exponential_cre_three_terms():
    approx = cre_series(EXP1, 3)
    # sum of H_{n+1} / (n(n+1)) for n = 1..3, minus the mean
    expected = 1.5 / 2.0 + (11.0 / 6.0) / 6.0 + (25.0 / 12.0) / 12.0 - 1.0
    assert approx.point_estimate == pytest.approx(expected, abs=1e-12)
    assert approx.point_estimate == pytest.approx(0.22917, abs=1e-5)
    assert approx.contains(1.0)
    assert approx.lower == approx.point_estimate


def test_exponential_wce_three_terms():
    approx = wce_series(EXP1, 3)
    assert approx.point_estimate == pytest.approx(1.0 - (1 / 8 + 1 / 54 + 1 / 192), abs=1e-12)
    assert approx.upper == approx.point_estimate


def test_ce_series_is_an_upper_end():
    approx = ce_series(EXP1, 10)
    assert approx.upper == approx.point_estimate
    assert approx.contains(math.pi ** 2 / 6.0 - 1.0)


@pytest.mark.parametrize("kind", list(EntropyKind))
@pytest.mark.parametrize("m", [1, 5, 50])
@pytest.mark.parametrize("dist", [EXP1, UNIFORM, build("uniform", a=3.0)], ids=["exp", "uniform", "uniform3"])
def test_brackets_contain_quadrature_value(dist, kind, m):
    approx = series(dist, kind, m)
    reference = entropy(dist, kind).value
    assert approx.lower <= approx.upper
    assert approx.contains(reference, slack=1e-9), f"{kind.value} m={m}: {approx.lower} {reference} {approx.upper}"


@pytest.mark.parametrize("row", [4, 5])
def test_quadrature_route_brackets(row):
    dist = table1_row(row)
    for kind in (EntropyKind.CRE, EntropyKind.CE):
        approx = series(dist, kind, 20)
        assert approx.contains(entropy(dist, kind).value, slack=1e-9)


def test_sum_identity_contains_cre_plus_ce():
    approx = sum_identity(EXP1, 20)
    assert approx.kind == SUM_IDENTITY
    assert approx.contains(math.pi ** 2 / 6.0)


def test_width_is_the_tail_majorant():
    for kind in (EntropyKind.CRE, EntropyKind.CE, EntropyKind.WCE, SUM_IDENTITY):
        approx = series(EXP1, kind, 7)
        assert approx.width == pytest.approx(tail_majorant(EXP1, kind, 7), rel=1e-12)


def test_wcre_without_majorant_is_uncertified():
    # Lomax(3) has unbounded support and no fourth moment
    approx = wcre_series(table1_row(4), 5)
    assert not approx.certified_upper
    assert approx.upper == math.inf
    assert approx.warnings


def test_wcre_with_majorant_is_certified():
    approx = wcre_series(EXP1, 5)
    assert approx.certified_upper
    assert math.isfinite(approx.upper)


def test_telescoped_form_agrees():
    for kind in EntropyKind:
        approx = series(EXP1, kind, 12)
        assert telescoped_partial_sum(EXP1, kind, 12) == pytest.approx(approx.partial_sum, rel=1e-12)


def test_ledger():
    approx = cre_series(UNIFORM, 4)
    rows = list(approx.ledger())
    assert [n for n, _, _, _ in rows] == [1, 2, 3, 4]
    for n, moment, weight, term in rows:
        assert weight == pytest.approx(1.0 / (n * (n + 1)))
        assert moment == pytest.approx((n + 1) / (n + 2))
        assert term == pytest.approx(weight * moment)


def test_degenerate_law_gives_zero():
    approx = cre_series(empirical_from_samples([2.0, 2.0, 2.0]), 4)
    assert approx.degenerate
    assert approx.point_estimate == 0.0
    assert approx.width == 0.0


TRUNCATIONS = [1, 2, 5, 10, 50, 200]
KINDS = list(EntropyKind)


def _assert_tightens(dist, kind, truncations):
    brackets = [series(dist, kind, m) for m in truncations]
    for before, after in zip(brackets, brackets[1:]):
        assert after.lower >= before.lower - 1e-9, f"{kind} lower m={before.m}->{after.m}"
        assert after.upper <= before.upper + 1e-9, f"{kind} upper m={before.m}->{after.m}"


@pytest.mark.parametrize("kind", KINDS + [SUM_IDENTITY])
@pytest.mark.parametrize("dist", [EXP1, UNIFORM], ids=["exp", "uniform"])
def test_brackets_tighten_monotonically(dist, kind):
    _assert_tightens(dist, kind, TRUNCATIONS)


@pytest.mark.slow
@pytest.mark.parametrize("row", [3, 4, 5, 6])
def test_table1_rows_contain_and_tighten(row):
    dist = table1_row(row)
    for kind in KINDS:
        _assert_tightens(dist, kind, TRUNCATIONS)
        if row == 4 and kind is EntropyKind.WCRE:
            # x^2 F̄(x) is not integrable for this law
            continue
        reference = entropy(dist, kind).value
        for m in TRUNCATIONS:
            assert series(dist, kind, m).contains(reference, slack=1e-9), f"{kind.value} m={m}"


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 6])
def test_telescoped_form_agrees_on_every_row(row):
    dist = table1_row(row)
    for kind in KINDS:
        assert telescoped_partial_sum(dist, kind, 10) == pytest.approx(series(dist, kind, 10).partial_sum,
                                                                       rel=1e-12, abs=1e-15)


def test_exponential_ce_reaches_the_zeta_value():
    approx = ce_series(EXP1, 10_000)
    target = math.pi ** 2 / 6.0 - 1.0
    assert approx.contains(target)
    assert abs(approx.point_estimate - target) <= approx.width + 1e-12
    assert approx.width < 0.02


def test_converge_at_initial_width_returns_first_truncation():
    approx = converge(EXP1, EntropyKind.CRE, tail_majorant(EXP1, EntropyKind.CRE, 1))
    assert approx.m == 1
    assert approx.converged


def test_converge_reaches_target():
    approx = converge(UNIFORM, EntropyKind.CE, 0.01)
    assert approx.converged
    assert approx.width <= 0.01
    assert 0.24 <= approx.lower and approx.upper <= 0.26


def test_converge_returns_smallest_m():
    approx = converge(EXP1, EntropyKind.CRE, 0.05)
    assert approx.m > 1
    assert tail_majorant(EXP1, EntropyKind.CRE, approx.m - 1) > 0.05
    assert approx.width <= 0.05


def test_converge_reports_unreached_target():
    approx = converge(EXP1, EntropyKind.CRE, 1e-6, m_max=10)
    assert not approx.converged
    assert approx.m == 10
    assert approx.warnings


def test_invalid_truncation():
    with pytest.raises(ValueError):
        cre_series(EXP1, 0)
    with pytest.raises(ValueError):
        converge(EXP1, EntropyKind.CRE, 0.0)
    with pytest.raises(ValueError):
        series(EXP1, "shannon", 3)


def test_negative_support_is_rejected():
    with pytest.raises(CapabilityError):
        cre_series(build("normal"), 3)


def heavy_tailed_lomax():
    """Lomax with alpha = 1.5: mean 2, infinite variance, CRE = alpha/(alpha-1)^2 = 6."""
    return DistributionSpec(kind="lomax", params=(("alpha", 1.5),), support=(0.0, math.inf),
                            dfr=True, law=LomaxLaw(1.5))


def test_cre_series_without_variance_is_lower_only():
    approx = cre_series(heavy_tailed_lomax(), 10)
    assert math.isfinite(approx.lower)
    assert approx.lower <= 6.0 + 1e-6
    assert approx.upper == math.inf
    assert not approx.certified_upper
    assert approx.certified_lower
    assert any("variance undefined" in w for w in approx.warnings)
    assert approx.summary()["certified_upper"] is False


def test_ce_series_without_variance_is_upper_only():
    approx = ce_series(heavy_tailed_lomax(), 10)
    assert math.isfinite(approx.upper)
    assert approx.upper >= 0.0
    assert approx.lower == 0.0
    assert not approx.certified_lower
    assert approx.certified_upper
    assert approx.summary()["certified_lower"] is False


def test_converge_without_variance_reports_not_converged():
    dist = heavy_tailed_lomax()
    assert tail_majorant(dist, EntropyKind.CRE, 5) == math.inf
    approx = converge(dist, EntropyKind.CRE, target_width=1e-3, m_max=5)
    assert approx.m == 5
    assert not approx.converged
    assert approx.upper == math.inf


def test_second_moment_series_need_finite_second_moment():
    with pytest.raises(MomentUndefinedError):
        wcre_series(heavy_tailed_lomax(), 3)
    with pytest.raises(MomentUndefinedError):
        sum_identity(heavy_tailed_lomax(), 3)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
