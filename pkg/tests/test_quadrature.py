#!/usr/bin/env python3
"""
Test the adaptive quadrature wrapper and the x log x helper.
"""

import math
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from core.exceptions import DomainError, IntegrandNaNError, IntegrationError
from core.quadrature import (
    DEFAULT_TOLERANCE,
    Tolerance,
    check_boundary_products,
    integrate,
    integrate_quantile,
    xlogx,
)


def test_finite_interval():
    result = integrate(lambda x: x, 0.0, 1.0)
    assert result.converged
    assert result.value == pytest.approx(0.5, abs=1e-12)
    assert result.evaluations > 0


def test_semi_infinite_interval():
    result = integrate(lambda x: math.exp(-x), 0.0, math.inf)
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-10)


def test_integrable_endpoint_singularity():
    # Endpoints are never evaluated
    result = integrate(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0)
    assert result.value == pytest.approx(2.0, abs=1e-8)


def test_empty_interval():
    result = integrate(lambda x: 1.0, 2.0, 2.0)
    assert (result.value, result.evaluations, result.converged) == (0.0, 0, True)


def test_nan_integrand_is_an_error():
    with pytest.raises(IntegrandNaNError):
        integrate(lambda x: float("nan"), 0.0, 1.0)


@pytest.mark.parametrize("f", [
    lambda x: math.exp(1e4 * x),
    lambda x: math.log(x - 0.5),
    lambda x: 1.0 / (x > 0.5),
])
def test_arithmetic_failure_becomes_integration_error(f):
    with pytest.raises(IntegrationError, match="integrand failed at x =") as info:
        integrate(f, 0.0, 1.0)
    assert isinstance(info.value.__cause__, (ArithmeticError, ValueError))


def test_quantile_substitution():
    # integral of exp(-x) over (0, inf) under x = -log(1 - p)
    result = integrate_quantile(lambda x: math.exp(-x), lambda p: -math.log1p(-p), lambda x: math.exp(-x))
    assert result.value == pytest.approx(1.0, abs=1e-10)


def test_linearity_on_random_polynomials():
    rng = np.random.default_rng(2024)
    for _ in range(5):
        f = np.polynomial.Polynomial(rng.normal(size=4))
        g = np.polynomial.Polynomial(rng.normal(size=3))
        a, b = rng.normal(size=2)
        combined = integrate(lambda x: a * f(x) + b * g(x), 0.0, 2.0)
        parts = a * integrate(f, 0.0, 2.0).value + b * integrate(g, 0.0, 2.0).value
        assert combined.value == pytest.approx(parts, abs=1e-9)


def test_substitution_agrees_with_direct_integration():
    # Exponential CRE integrand -F̄ log F̄ = x exp(-x)
    def integrand(x):
        return -xlogx(math.exp(-x))

    direct = integrate(integrand, 0.0, math.inf)
    substituted = integrate_quantile(integrand, lambda p: -math.log1p(-p), lambda x: math.exp(-x))
    assert direct.value == pytest.approx(substituted.value, abs=1e-6)
    assert direct.value == pytest.approx(1.0, abs=1e-8)


def test_xlogx_grid():
    grid = np.linspace(0.0, 1.0, 10_001)
    values = np.array([xlogx(u) for u in grid])
    assert np.all(values <= 0.0)
    assert values.min() == pytest.approx(-1.0 / math.e, abs=1e-8)
    assert grid[values.argmin()] == pytest.approx(1.0 / math.e, abs=1e-4)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(abs_tol=0.0)
    with pytest.raises(ValueError):
        Tolerance(max_evaluations=0)

    loose = DEFAULT_TOLERANCE.with_abs(1e-6)
    assert loose.abs_tol == 1e-6
    assert loose.rel_tol == DEFAULT_TOLERANCE.rel_tol
    assert loose.allowed_error(10.0) == pytest.approx(max(1e-6, DEFAULT_TOLERANCE.rel_tol * 10.0))


def test_xlogx():
    assert xlogx(0.0) == 0.0
    assert xlogx(1.0) == 0.0
    assert xlogx(0.5) == pytest.approx(0.5 * math.log(0.5))
    # Round-off of 1 - F is clamped
    assert xlogx(1.0 + 1e-13) == 0.0
    assert xlogx(-1e-13) == 0.0


@pytest.mark.parametrize("u", [-0.1, 1.1, float("nan")])
def test_xlogx_domain(u):
    with pytest.raises(DomainError):
        xlogx(u)


def test_boundary_products():
    assert check_boundary_products(lambda x: 0.0, [1.0, 2.0]) == []

    warnings = check_boundary_products(lambda x: 0.5, [1.0], label="x F log F")
    assert len(warnings) == 1
    assert "x F log F" in warnings[0]

    # Evaluation failures are skipped
    assert check_boundary_products(lambda x: 1.0 / 0.0, [1.0]) == []


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
