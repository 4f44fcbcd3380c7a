"""Scalar numerics: Lambert W, root finding, Newton, half-line quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lambertw as scipy_lambertw

from bubbletower.numerics import (lambert_w0, find_root, newton_solve,
                                  integrate_halfline, RootBracket,
                                  BracketError, DomainError)


def test_lambert_reference_values():
    # independent oracle: scipy's implementation
    for x in [-1.0 / math.e, -0.3, -0.05, 0.0, 0.30327, 1.0, 10.0, 1e6]:
        assert lambert_w0(x) == pytest.approx(
            float(scipy_lambertw(x).real), abs=1e-14, rel=1e-13)
    # frozen spot value
    assert lambert_w0(0.30327) == pytest.approx(0.238804, abs=1e-6)


def test_lambert_branch_point_and_domain():
    assert lambert_w0(-1.0 / math.e) == pytest.approx(-1.0, abs=1e-6)
    with pytest.raises(DomainError):
        lambert_w0(-1.0 / math.e - 1e-8)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-math.exp(-1.0) + 1e-12, max_value=1e8))
def test_lambert_defining_identity(x):
    w = lambert_w0(x)
    assert w * math.exp(w) == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_find_root_simple():
    r = find_root(lambda x: x * x - 2.0, RootBracket(0.0, 2.0))
    assert r == pytest.approx(math.sqrt(2.0), rel=1e-13)


def test_root_bracket_validation():
    with pytest.raises(BracketError):
        RootBracket(1.0, 1.0)
    with pytest.raises(BracketError):
        RootBracket(0.0, 1.0, tol=0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.1, max_value=50.0))
def test_find_root_inverts_exp(target):
    r = find_root(lambda x: math.exp(x) - target,
                  RootBracket(-10.0, 10.0))
    assert r == pytest.approx(math.log(target), rel=1e-12, abs=1e-12)


def test_newton_solve_2d():
    def G(x):
        return np.array([x[0] ** 2 + x[1] - 3.0, x[0] - x[1]])

    x = newton_solve(G, np.array([2.0, 2.0]))
    root = (-1.0 + math.sqrt(13.0)) / 2.0
    assert np.allclose(x, [root, root], atol=1e-12)


def test_integrate_halfline_exponential():
    val = integrate_halfline(lambda x: np.exp(-x))
    assert val == pytest.approx(1.0, rel=1e-10)


def test_integrate_halfline_rational():
    val = integrate_halfline(lambda x: 1.0 / (1.0 + x ** 2))
    assert val == pytest.approx(math.pi / 2.0, rel=1e-10)
