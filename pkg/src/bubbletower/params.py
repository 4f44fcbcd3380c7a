"""Tower parameters: exponents alpha_j, ratios s_j, rates b_j, scales delta_j.

The k-bubble tower is governed by a small nonlinear system in the variables
((alpha_j, s_j)_{j<k}, alpha_k) perturbed in t = 1/p.  At t = 0 the system
decouples into a recursion (alpha_1 = 2, then a scalar root for each s_j and
alpha_{j+1} = 2 + (alpha_j + 2)/s_j), which doubles as the Newton starting
point for t > 0.  After the Newton solve the scales delta_j and amplitudes
tau_j are back-substituted in log form; delta_j itself underflows for
moderate p and is never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import RootBracket, find_root, lambert_w0, newton_solve


@dataclass(frozen=True)
class UnperturbedParams:
    """Solution of the t=0 (p=infinity) exponent system."""

    k: int
    alpha: tuple[float, ...]
    s: tuple[float, ...]


@dataclass(frozen=True)
class ParamSet:
    """All solved tower parameters for a given (k, p).

    delta_j and C_j are stored only through ln_delta / ln_C since
    delta_j = C_j e^{-b_j p} underflows already for moderate p.
    """

    k: int
    p: float
    alpha: tuple[float, ...]
    s: tuple[float, ...]
    eps: tuple[float, ...]
    b: tuple[float, ...]
    ln_delta: tuple[float, ...]
    ln_C: tuple[float, ...]
    tau: tuple[float, ...]
    c: tuple[float, ...]
    corr0: tuple[float, ...]
    corr1: tuple[float, ...]
    w0_at_0: tuple[float, ...]
    w1_at_0: tuple[float, ...]
    h0: float


def zeta(alpha, s):
    """The scalar function whose root in (0,1) links consecutive exponents."""
    return 0.5 * (alpha + 2.0) * np.log(s) + 1.0 + s


def s_bounds(alpha):
    """Closed-form enclosure (lo, hi) of the root of zeta(alpha, .) in (0,1)."""
    lo = (alpha + 4.0) / ((alpha + 2.0) * math.exp(4.0 / (alpha + 2.0)) + 2.0)
    hi = math.exp(-2.0 / (alpha + 2.0))
    return lo, hi


def solve_unperturbed(k):
    """Solve the limiting exponent system recursively by scalar root finding."""
    if k < 1:
        raise ValueError("k must be >= 1")
    alpha = [2.0]
    s = []
    for _ in range(k - 1):
        a = alpha[-1]
        sj = find_root(lambda x: zeta(a, x), RootBracket(1e-6, 1.0, tol=1e-15))
        s.append(sj)
        alpha.append(2.0 + (a + 2.0) / sj)
    return UnperturbedParams(k=k, alpha=tuple(alpha), s=tuple(s))


def alpha_via_lambert(k):
    """The same exponent sequence through the Lambert-W form of the recursion."""
    if k < 1:
        raise ValueError("k must be >= 1")
    alpha = [2.0]
    for _ in range(k - 1):
        u = 2.0 / (alpha[-1] + 2.0)
        alpha.append(2.0 + 2.0 / lambert_w0(u * math.exp(-u)))
    return alpha


def _tau_ratio(s, i, j):
    """tau_i / tau_j expressed through consecutive ratios s_m = tau_{m+1}/tau_m."""
    if i == j:
        return 1.0
    if i > j:
        out = 1.0
        for m in range(j, i):
            out *= s[m - 1]
        return out
    out = 1.0
    for m in range(i, j):
        out *= s[m - 1]
    return 1.0 / out


def _c_constants(alpha, s, t, consts, h0):
    """The additive constants c_j of the delta-equations (j = 1..k)."""
    k = len(alpha)
    atilde = [a - 0.5 * c0 * t - 0.5 * c1 * t * t
              for a, (c0, c1, _, _) in zip(alpha, consts)]
    c = []
    for j in range(1, k + 1):
        val = -math.log(2.0 * alpha[j - 1] ** 2)
        if h0 != 0.0:
            val += 4.0 * math.pi * h0 * sum(
                (-1) ** (i - j) * _tau_ratio(s, i, j) * atilde[i - 1]
                for i in range(1, k + 1))
        for i in range(j + 1, k + 1):
            _, _, w0_0, w1_0 = consts[i - 1]
            val += ((-1) ** (i - j) * _tau_ratio(s, i, j)
                    * (w0_0 * t + w1_0 * t * t))
        c.append(val)
    return c


def _unpack(x, k):
    """x = [alpha_1, s_1, alpha_2, s_2, ..., alpha_k] -> (alpha, s) lists."""
    alpha = [x[2 * j] for j in range(k)]
    s = [x[2 * j + 1] for j in range(k - 1)]
    return alpha, s


def reduced_system(x, k, t, consts, h0):
    """Residual of the reduced (alpha, s) system at perturbation t = 1/p.

    Equations ordered (g_1, h_1, ..., g_{k-1}, h_{k-1}, g_k) to match the
    variable ordering (alpha_1, s_1, ..., s_{k-1}, alpha_k).
    """
    alpha, s = _unpack(x, k)
    two_atilde = [2.0 * a - c0 * t - c1 * t * t
                  for a, (c0, c1, _, _) in zip(alpha, consts)]
    c = _c_constants(alpha, s, t, consts, h0)
    out = np.empty(2 * k - 1)
    out[0] = alpha[0] - 2.0
    for i in range(2, k + 1):
        out[2 * (i - 1)] = ((alpha[i - 1] - 2.0) * s[i - 2]
                            - (two_atilde[i - 2] - alpha[i - 2] + 2.0))
    tfac = t / (1.0 - t)
    for i in range(1, k):
        si = s[i - 1]
        out[2 * i - 1] = (0.5 * (two_atilde[i - 1] - alpha[i - 1] + 2.0)
                          * math.log(si) + 1.0 + si
                          - (c[i - 1] + si * c[i] - (1.0 + si)) * tfac)
    return out


def unperturbed_jacobian(up):
    """Analytic Jacobian of the reduced system at t = 0 (lower triangular)."""
    k = up.k
    n = 2 * k - 1
    J = np.zeros((n, n))
    J[0, 0] = 1.0
    for i in range(2, k + 1):
        row = 2 * (i - 1)
        J[row, 2 * (i - 1)] = up.s[i - 2]          # d g_i / d alpha_i
        J[row, 2 * (i - 2)] = -1.0                 # d g_i / d alpha_{i-1}
        J[row, 2 * (i - 2) + 1] = up.alpha[i - 1] - 2.0  # d g_i / d s_{i-1}
    for i in range(1, k):
        row = 2 * i - 1
        J[row, 2 * (i - 1)] = 0.5 * math.log(up.s[i - 1])
        J[row, 2 * i - 1] = (up.alpha[i - 1] + 2.0) / (2.0 * up.s[i - 1]) + 1.0
    return J


def solve_full_system(k, p, profile_consts=None, h0=0.0, tol=1e-12):
    """Solve the full parameter system at finite p and back-substitute scales.

    Args:
        k: number of bubbles.
        p: nonlinearity exponent (p > 1; Newton from the unperturbed start
           converges for p >= 20 in practice).
        profile_consts: callable alpha -> (C0, C1, w0_at_0, w1_at_0); defaults
           to the correction-profile constants computed by the profiles module.
        h0: Robin value of the domain at the center (0 for the unit disk).
        tol: sup-norm tolerance for the Newton residual.

    The profile constants are held fixed at the unperturbed exponents during
    the Newton iterations and refreshed once at the solved exponents (one
    outer iteration), since they enter only at order 1/p.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if profile_consts is None:
        from .profiles import correction_constants
        profile_consts = correction_constants
    up = solve_unperturbed(k)
    t = 1.0 / p

    x = np.empty(2 * k - 1)
    x[::2] = up.alpha
    x[1::2] = up.s
    consts = [profile_consts(a) for a in up.alpha]
    for _ in range(2):  # solve, refresh constants at solved alphas, re-solve
        x = newton_solve(lambda y: reduced_system(y, k, t, consts, h0), x,
                         tol=tol)
        alpha, s = _unpack(x, k)
        consts = [profile_consts(a) for a in alpha]

    alpha, s = _unpack(x, k)
    c = _c_constants(alpha, s, t, consts, h0)
    denom = [2.0 * a - c0 * t - c1 * t * t - a + 2.0
             for a, (c0, c1, _, _) in zip(alpha, consts)]

    ln_delta = [0.0] * k
    ln_tau = [0.0] * k
    b = [0.0] * k
    ln_C = [0.0] * k
    ln_delta[k - 1] = (c[k - 1] - p) / denom[k - 1]
    ln_tau[k - 1] = -(p * math.log(p) + 2.0 * ln_delta[k - 1]) / (p - 1.0)
    b[k - 1] = 1.0 / denom[k - 1]
    ln_C[k - 1] = c[k - 1] / denom[k - 1]
    for j in range(k - 2, -1, -1):
        sj = s[j]
        ln_delta[j] = (ln_delta[j + 1] - (1.0 + sj) * p / denom[j]
                       + (c[j] + sj * c[j + 1]) / denom[j])
        ln_tau[j] = ln_tau[j + 1] - math.log(sj)
        b[j] = b[j + 1] + (1.0 + sj) / denom[j]
        ln_C[j] = ln_C[j + 1] + (c[j] + sj * c[j + 1]) / denom[j]

    return ParamSet(
        k=k, p=p,
        alpha=tuple(alpha), s=tuple(s),
        eps=tuple(sj / (1.0 + sj) for sj in s),
        b=tuple(b),
        ln_delta=tuple(ln_delta),
        ln_C=tuple(ln_C),
        tau=tuple(math.exp(lt) for lt in ln_tau),
        c=tuple(c),
        corr0=tuple(cc[0] for cc in consts),
        corr1=tuple(cc[1] for cc in consts),
        w0_at_0=tuple(cc[2] for cc in consts),
        w1_at_0=tuple(cc[3] for cc in consts),
        h0=h0,
    )


def check_structural_properties(ps):
    """Verify the structural inequalities of a solved ParamSet.

    Returns a dict name -> (passed, detail).  Report-only: nothing raises.
    Bounds with unspecified constants (alpha_k <= C, C^{-1} <= b_k) are
    reported as realized values.
    """
    k, p = ps.k, ps.p
    checks = {}

    def add(name, passed, detail):
        checks[name] = (bool(passed), detail)

    add("alpha_increasing",
        all(ps.alpha[j + 1] > ps.alpha[j] + 4.0 for j in range(k - 1)),
        f"alpha={ps.alpha}")
    add("b_decreasing_positive",
        all(ps.b[j] > ps.b[j + 1] for j in range(k - 1)) and ps.b[-1] > 0.0,
        f"b={ps.b}")
    err = max(abs(ps.ln_delta[j] - (ps.ln_C[j] - ps.b[j] * p))
              for j in range(k))
    add("ln_delta_decomposition", err <= 1e-8 * max(1.0, p),
        f"max |ln_delta - (ln_C - b p)| = {err:.3g}")
    amp = max(abs(p * math.log(p) + (p - 1.0) * math.log(ps.tau[j])
                  + 2.0 * ps.ln_delta[j]) for j in range(k))
    add("amplitude_constraint_log_form", amp <= 1e-8,
        f"max |p ln p + (p-1) ln tau + 2 ln delta| = {amp:.3g}")
    add("eps_definition",
        all(abs(ps.eps[j] - ps.s[j] / (1.0 + ps.s[j])) <= 1e-14
            for j in range(k - 1)),
        f"eps={ps.eps}")
    if k > 1:
        s_lo = 3.0 / (2.0 * math.e + 1.0)
        add("s_range",
            s_lo < ps.s[0]
            and all(ps.s[j] < ps.s[j + 1] for j in range(k - 2))
            and ps.s[-1] < 1.0,
            f"s={ps.s}, lower bound {s_lo:.6f}")
        e_lo = 1.0 / (math.e + 1.0)
        add("eps_range",
            e_lo < ps.eps[0]
            and all(ps.eps[j] < ps.eps[j + 1] for j in range(k - 2))
            and ps.eps[-1] < 0.5,
            f"eps={ps.eps}, lower bound {e_lo:.6f}")
        ok = True
        details = []
        for j in range(k - 1):
            lo, hi = s_bounds(ps.alpha[j])
            details.append((lo, ps.s[j], hi))
            ok = ok and lo <= ps.s[j] <= hi
        add("s_convexity_bounds", ok, f"(lo, s, hi) per j: {details}")
    add("realized_scale_constants", True,
        f"alpha_k={ps.alpha[-1]:.6f}, b_k={ps.b[-1]:.6f}, "
        f"b_1={ps.b[0]:.6f} (reported, no asserted C)")
    return checks
