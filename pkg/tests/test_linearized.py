"""Relation matrix, determinant recursion, barrier inequalities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbletower.numerics import DomainError
from bubbletower.integrals import closed_form_I
from bubbletower.linearized import (build_matrix, det_and_recursion_check,
                                    recursion_check, reduced_blocks,
                                    _cofactor_det, R_tilde_threshold,
                                    r_tilde_threshold,
                                    default_barrier_config,
                                    barrier_under_check, barrier_over_check,
                                    psi_profiles_check, mass_decomp_check,
                                    supersolution_check)


def test_matrix_pattern_k2(ps_k2_p100):
    ps = ps_k2_p100
    tm = build_matrix(ps)
    I1, I2 = closed_form_I(ps.alpha[0]), closed_form_I(ps.alpha[1])
    b1, b2 = ps.b
    pi2, pi4 = 2.0 * math.pi, 4.0 * math.pi
    expected = np.array([
        [1.0, I1, 0.0, 0.0],
        [b1, pi2, b2, pi4],
        [2.0, 0.0, 1.0, I2],
        [b2, 0.0, b2, pi2],
    ])
    assert np.allclose(tm.entries, expected, rtol=0, atol=0)


def test_det_k1_closed_form(ps_k1_p100):
    ps = ps_k1_p100
    tm = build_matrix(ps)
    expected = 2.0 * math.pi - ps.b[0] * closed_form_I(ps.alpha[0])
    res = det_and_recursion_check(tm)
    assert res["det"] == pytest.approx(expected, rel=1e-12)
    assert res["det"] > 0.0


def test_cofactor_det_matches_lu():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 5, 8):
        m = rng.standard_normal((n, n))
        assert _cofactor_det(m) == pytest.approx(
            float(np.linalg.det(m)), rel=1e-10, abs=1e-12)


def test_reduced_blocks_pattern():
    m = reduced_blocks([1.5, 2.5], [0.5, 3.0])
    expected = np.array([
        [1.0, -1.5, 0.0, 0.0],
        [0.5, 1.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, -2.5],
        [0.0, 0.0, 3.0, 1.0],
    ])
    assert np.array_equal(m, expected)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers())
def test_recursion_identity_random(k, seed):
    rng = np.random.default_rng(seed % 2 ** 32)
    a = rng.uniform(0.05, 8.0, k)
    c = rng.uniform(0.05, 8.0, k)
    assert recursion_check(list(a), list(c)) <= 1e-10


def test_determinant_positive_small_towers():
    from bubbletower.params import solve_full_system
    for k in (1, 2, 3):
        ps = solve_full_system(k, 100.0)
        res = det_and_recursion_check(build_matrix(ps))
        assert res["det"] > 0.0
        assert res["recursion_defect"] <= 1e-10


def test_threshold_formula_guards():
    # under barrier needs D lam^alpha < c0; over needs D < c0 Lam^alpha
    with pytest.raises(DomainError):
        R_tilde_threshold(2.0, 0.5, 0.9, 10.0)
    with pytest.raises(DomainError):
        r_tilde_threshold(2.0, 0.5, 1.1, 10.0)
    # thresholds grow/shrink with the demanded mass constant
    assert R_tilde_threshold(4.0, 0.5, 0.1, 8.0) >= \
        R_tilde_threshold(4.0, 0.5, 0.1, 2.0)
    assert r_tilde_threshold(4.0, 0.5, 10.0, 8.0) <= \
        r_tilde_threshold(4.0, 0.5, 10.0, 2.0)


@pytest.fixture(scope="module")
def cfg_k2(ps_k2_p100):
    # fixed mass constant: the barrier checks are pure inequalities in
    # the solved parameters, no tower assembly required here
    return default_barrier_config(ps_k2_p100, C_bar=1.5)


def test_barriers_hold(ps_k2_p100, cfg_k2):
    for j in (1, 2):
        assert barrier_under_check(cfg_k2, ps_k2_p100, j)["ok"]
        assert barrier_over_check(cfg_k2, ps_k2_p100, j)["ok"]


def test_barrier_near_equality_at_threshold(ps_k2_p100, cfg_k2):
    # the barrier value touches c0 exactly at the threshold radius when
    # the c0-branch of the max/min formula is active
    r = barrier_under_check(cfg_k2, ps_k2_p100, 1)
    assert r["min_psi"] == pytest.approx(cfg_k2.c0, abs=1e-9)
    r = barrier_over_check(cfg_k2, ps_k2_p100, 1)
    assert r["min_psi"] == pytest.approx(cfg_k2.c0, abs=1e-9)


def test_psi_profiles(ps_k2_p100, cfg_k2):
    for j in (1, 2):
        rep = psi_profiles_check(cfg_k2, ps_k2_p100, j)
        assert rep["ok"], rep
        assert rep["C1"] < 0.0 < rep["C2"]
        assert rep["boundary_values"] < 1e-12
        assert rep["laplacian_identity"]
        # realized max respects the stated bound up to the o(1) defect
        assert rep["max_psi"] <= rep["max_bound"] * 1.05


def test_mass_decomposition(ps_k2_p100, cfg_k2):
    rep = mass_decomp_check(ps_k2_p100, cfg_k2)
    assert rep["ok"], rep


def test_supersolution(ps_k2_p100, cfg_k2):
    for j in (1, 2):
        rep = supersolution_check(cfg_k2, ps_k2_p100, 1.5, j)
        assert rep["ok"], rep
