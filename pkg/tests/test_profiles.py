"""Correction profiles: ODE residual, growth constants, Taylor helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbletower.profiles import (correction_profiles, correction_constants,
                                  ode_residual, taylor_check, phi0, phi1,
                                  z0, v_alpha, V_alpha)

# exponents exercised by the downstream checks (the largest is the third
# limiting tower exponent); the absolute residual contract is calibrated
# to this range -- beyond it the source term magnitude (~alpha^4) pushes
# the float64 rounding floor of the representation formula above 1e-8
# even though the relative accuracy stays at the 1e-12 level
RESIDUAL_ALPHAS = [2.0, 3.7, 6.0, 8.5, 10.373980946278852, 12.5, 15.0,
                   18.427730498537745]

# exact growth constant of the first correction profile at alpha = 2,
# derived in closed form from the representation integral
C_F0_AT_2 = 12.0 * (1.0 - math.log(2.0))


@pytest.mark.parametrize("alpha", RESIDUAL_ALPHAS)
def test_ode_residual_contract(alpha):
    w0, w1, *_ = correction_profiles(alpha)
    for prof in (w0, w1):
        res = ode_residual(prof)
        assert float(np.max(np.abs(res))) < 1e-8


def test_growth_constant_exact_at_2():
    c0, c1, w00, w10 = correction_constants(2.0)
    assert c0 == pytest.approx(C_F0_AT_2, abs=5e-13)


@pytest.mark.parametrize("alpha", [2.0, 6.0, 10.373980946278852])
def test_last_decade_slope_matches_growth_constant(alpha):
    w0, w1, *_ = correction_profiles(alpha)
    for prof in (w0, w1):
        ln_r = np.log(np.asarray(prof.grid, dtype=float))
        mask = ln_r >= ln_r[-1] - math.log(10.0)
        slope = float(np.polyfit(
            ln_r[mask], np.asarray(prof.values, dtype=float)[mask], 1)[0])
        assert slope == pytest.approx(prof.C_F, rel=1e-3)


def test_profile_extension_behaviour():
    w0, *_ = correction_profiles(2.0)
    # below the grid: constant at the origin value
    assert float(w0(1e-30)) == pytest.approx(w0.w_at_0, abs=1e-12)
    # beyond the grid: pure logarithmic growth
    big = float(w0.grid[-1]) * 1e6
    assert float(w0(big)) == pytest.approx(w0.C_F * math.log(big),
                                           rel=1e-10)
    # eval_ln agrees with direct evaluation inside the grid
    for r in (0.5, 3.0, 1e3):
        assert w0.eval_ln(math.log(r)) == pytest.approx(float(w0(r)),
                                                        abs=1e-12)


def test_taylor_check_trivial():
    lhs, rhs, err = taylor_check(0.0, 0.0, 0.0, 100.0)
    assert lhs == rhs == 1.0 and err == 0.0


@pytest.mark.parametrize("p", [1e2, 1e3])
def test_taylor_remainder_cubic_rate(p):
    _, _, e1 = taylor_check(1.0, 1.0, 1.0, p)
    _, _, e2 = taylor_check(1.0, 1.0, 1.0, 2.0 * p)
    assert 6.0 <= e1 / e2 <= 10.0


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-150.0, max_value=5.0))
def test_gpp_exponential_bound(s):
    p = 150.0
    assert abs(1.0 + s / p) ** p <= math.exp(s) * (1.0 + 1e-14)


def test_phi_expansion_coefficients():
    # phi0, phi1 are exactly the 1/p and 1/p^2 coefficients of
    # (1 + a/p + b/p^2 + c/p^3)^p e^{-a}; recover them by Richardson
    # extrapolation of the remainder and compare
    a, b, c = 0.7, -0.3, 0.2
    for p in (1e3, 4e3):
        lhs, rhs, err = taylor_check(a, b, c, p)
        # remainder after matching through 1/p^2 must be O(p^-3)
        assert err < 50.0 / p ** 3


def test_bubble_direction_values():
    assert z0(4.0, 1.0) == 0.0
    assert z0(4.0, 0.0) == 1.0
    assert z0(4.0, np.inf) == -1.0
    # v_alpha peaks with value ln(2 alpha^2) at rho = 1... (at rho=1 it is
    # ln(2 a^2) - 2 ln 2); spot-check the closed form
    a = 3.0
    assert v_alpha(a, 1.0) == pytest.approx(math.log(2 * a * a) -
                                            2 * math.log(2))
    # V differs from v by the radial power
    r = 0.37
    assert V_alpha(a, r) == pytest.approx(v_alpha(a, r) +
                                          (a - 2) * math.log(r))


def test_eigenfunction_identity():
    # z(r) = (1-r^a)/(1+r^a) solves z'' + z'/r + r^{a-2} e^{v_a} z = 0;
    # check with centered differences away from the origin
    a = 5.0
    r = np.linspace(0.3, 3.0, 400)
    h = r[1] - r[0]
    z = z0(a, r)
    lap = (z[2:] - 2 * z[1:-1] + z[:-2]) / h ** 2 \
        + (z[2:] - z[:-2]) / (2 * h * r[1:-1])
    mass = r[1:-1] ** (a - 2.0) * np.exp(v_alpha(a, r[1:-1]))
    assert float(np.max(np.abs(lap + mass * z[1:-1]))) < 1e-5


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-3.0, max_value=3.0),
       st.floats(min_value=-3.0, max_value=3.0))
def test_phi1_closed_form(v, w):
    expect = v * w - v ** 3 / 3.0 - w * w / 2.0 - v ** 4 / 8.0 \
        + v * v * w / 2.0
    assert float(phi1(v, w)) == pytest.approx(expect, rel=1e-12, abs=1e-12)
