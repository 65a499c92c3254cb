#!/usr/bin/env python3
"""
Test the distribution catalog, the spec parser and sample ingestion.
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from core.distributions import (
    DistributionSpec,
    LomaxLaw,
    build,
    empirical_from_samples,
    first_moment,
    moments,
    parse_sample_lines,
    parse_spec,
    scaled,
    table1_row,
    table1_rows,
)
from core.exceptions import (
    DomainError,
    IngestionError,
    InvalidParameterError,
    MomentUndefinedError,
    SpecParseError,
)
from core.quadrature import integrate


def test_parse_exponential():
    dist = parse_spec("exp(lambda=2)")
    assert dist.kind == "exp"
    assert dist.param_dict == {"lambda": 2.0}
    assert dist.support == (0.0, math.inf)
    assert dist.dfr is True
    assert dist.symmetric_about is None


def test_parse_tolerates_whitespace():
    assert parse_spec("  uniform( a = 3 ) ") == build("uniform", a=3.0)


def test_table1_aliases_resolve_to_catalog_laws():
    assert parse_spec("table1:row1") == build("exp", **{"lambda": 1.0})
    assert parse_spec("table1:row2") == build("uniform", a=1.0)
    assert parse_spec("table1:row5").param_dict == {"k": 2.0}
    assert len(table1_rows()) == 6


@pytest.mark.parametrize("text", [
    "exp()",
    "exp(",
    "exp(lambda=1",
    "gamma(a=1)",
    "exp(lambda=1, lambda=2)",
    "exp(mu=1)",
    "exp(lambda=abc)",
    "table1:row4(a=1)",
    "exp(lambda=1) trailing",
])
def test_malformed_specs_are_rejected(text):
    with pytest.raises(SpecParseError):
        parse_spec(text)


def test_parse_error_reports_position():
    with pytest.raises(SpecParseError) as excinfo:
        parse_spec("exp(lambda=1")
    assert excinfo.value.position == len("exp(lambda=1")


@pytest.mark.parametrize("text", ["exp(lambda=0)", "exp(lambda=-1)", "uniform(a=0)", "power(k=-2)"])
def test_invalid_parameter_values(text):
    with pytest.raises(InvalidParameterError):
        parse_spec(text)


def test_table1_row_out_of_range():
    with pytest.raises(SpecParseError):
        table1_row(7)


def test_cdf_and_survival_are_complementary():
    for row in range(1, 7):
        dist = table1_row(row)
        x = 0.3
        assert dist.cdf(x) + dist.sf(x) == pytest.approx(1.0, abs=1e-14), f"row {row}"


@pytest.mark.parametrize("row", [1, 3, 4, 5, 6])
def test_quantile_inverts_cdf(row):
    dist = table1_row(row)
    for p in (0.01, 0.3, 0.9):
        assert dist.cdf(dist.quantile(p)) == pytest.approx(p, abs=1e-9)


def test_quantile_outside_unit_interval():
    dist = build("exp", **{"lambda": 1.0})
    with pytest.raises(DomainError):
        dist.quantile(0.0)
    with pytest.raises(DomainError):
        dist.quantile(1.0)


def test_uniform_is_symmetric_about_midpoint():
    dist = build("uniform", a=2.0)
    assert dist.symmetric_about == 1.0
    assert dist.bounded_support


def test_closed_form_moments():
    pair = moments(build("exp", **{"lambda": 1.0}))
    assert (pair.mean, pair.second_moment, pair.variance) == (1.0, 2.0, 1.0)

    pair = moments(table1_row(4))
    assert pair.mean == pytest.approx(0.5)
    assert pair.second_moment == pytest.approx(1.0)
    assert pair.sigma == pytest.approx(math.sqrt(0.75))
    assert pair.fourth_moment is None


def test_quadrature_moments_match_published_sigma():
    # Row 6 bound cell is 1.21 sigma
    pair = moments(table1_row(6))
    assert pair.sigma == pytest.approx(1.1238 / 1.21, abs=2e-3)

    pair = moments(table1_row(3))
    assert 0.0 < pair.mean < 1.0
    assert pair.variance > 0.0


def test_scaling():
    assert scaled(build("exp", **{"lambda": 1.0}), 2.0) == build("exp", **{"lambda": 0.5})
    doubled = scaled(table1_row(4), 2.0)
    assert moments(doubled).mean == pytest.approx(1.0)
    assert doubled.cdf(2.0) == pytest.approx(table1_row(4).cdf(1.0))
    with pytest.raises(InvalidParameterError):
        scaled(table1_row(4), 0.0)


def test_spec_is_hashable_and_value_equal():
    assert hash(build("uniform", a=1.0)) == hash(build("uniform", a=1.0))
    assert build("uniform", a=1.0) != build("uniform", a=2.0)


def test_empirical_step_cdf():
    dist = empirical_from_samples([1.0, 0.0])
    assert dist.is_empirical
    assert not dist.has_pdf
    assert dist.cdf(0.0) == 0.5
    assert dist.cdf(0.5) == 0.5
    assert dist.cdf(1.0) == 1.0
    assert dist.support == (0.0, 1.0)


def test_empirical_fingerprint_ignores_order():
    assert empirical_from_samples([3.0, 1.0, 2.0]).fingerprint == empirical_from_samples([1.0, 2.0, 3.0]).fingerprint


@pytest.mark.parametrize("data", [[], [-1.0, 2.0], [1.0, float("inf")]])
def test_empirical_rejects_bad_data(data):
    with pytest.raises(IngestionError):
        empirical_from_samples(data)


def test_parse_sample_lines():
    assert parse_sample_lines(["# header", "1.5", "", "  2 "]) == [1.5, 2.0]


def test_parse_sample_lines_reports_line_number():
    with pytest.raises(IngestionError, match="line 2"):
        parse_sample_lines(["1.0", "abc"])
    with pytest.raises(IngestionError, match="line 1"):
        parse_sample_lines(["-0.5"])


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 6])
def test_cdf_is_monotone_on_a_grid(row):
    dist = table1_row(row)
    lower, upper = dist.support
    top = upper if math.isfinite(upper) else dist.quantile(0.999)
    grid = np.linspace(lower, top, 1000)
    values = np.array([dist.cdf(x) for x in grid])
    assert np.all(np.diff(values) >= 0.0)
    assert values[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 6])
def test_density_integrates_to_one(row):
    dist = table1_row(row)
    result = integrate(dist.pdf, *dist.support)
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 6])
def test_quantile_round_trip_on_a_grid(row):
    dist = table1_row(row)
    for p in np.linspace(0.01, 0.99, 99):
        assert abs(dist.cdf(dist.quantile(p)) - p) < 1e-8


def test_uniform_symmetry_grid():
    for a in (1.0, 3.0):
        dist = build("uniform", a=a)
        c = dist.symmetric_about
        for t in np.linspace(0.0, a / 2.0, 51):
            assert dist.cdf(c - t) == pytest.approx(dist.sf(c + t), abs=1e-14)


def test_worked_cdf_and_quantile_values():
    assert build("exp", **{"lambda": 1.0}).cdf(0.0) == 0.0
    assert table1_row(4).cdf(1.0) == pytest.approx(0.875, abs=1e-14)
    assert table1_row(5).quantile(0.25) == pytest.approx(0.5, abs=1e-12)
    assert build("uniform", a=2.0).quantile(0.5) == pytest.approx(1.0)
    assert moments(empirical_from_samples([0.0, 2.0])).mean == pytest.approx(1.0)


@pytest.mark.parametrize("x", [50.0, 800.0, 1e4])
def test_exp_reciprocal_far_tail_is_finite(x):
    row6 = table1_row(6)
    assert row6.cdf(x) == pytest.approx(1.0, abs=1e-20)
    assert 0.0 <= row6.sf(x) <= 2.0 * math.exp(-x)
    assert row6.pdf(x) >= 0.0
    assert math.isfinite(row6.pdf(x))


def test_exp_reciprocal_moments():
    pair = moments(table1_row(6))
    assert math.isfinite(pair.mean) and pair.mean > 0.0
    assert math.isfinite(pair.second_moment)
    assert pair.second_moment >= pair.mean ** 2


def test_infinite_variance_is_undefined_but_mean_is_not():
    dist = DistributionSpec(kind="lomax", params=(("alpha", 1.5),), support=(0.0, math.inf),
                            dfr=True, law=LomaxLaw(1.5))
    with pytest.raises(MomentUndefinedError):
        moments(dist)
    assert first_moment(dist) == pytest.approx(2.0)
    assert first_moment(table1_row(6)) == pytest.approx(moments(table1_row(6)).mean, rel=1e-8)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
