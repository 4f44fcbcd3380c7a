"""Shared numerical primitives: quadrature, root finding, Newton continuation.

Everything downstream (parameter solving, profile construction, integral
verification) goes through the helpers in this module so that tolerances and
failure modes are uniform across the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize


class DomainError(ValueError):
    """Raised when an argument lies outside a function's domain."""


class BracketError(ValueError):
    """Raised when a root bracket does not actually bracket a sign change."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative method fails to reach its tolerance."""


class SingularJacobianError(ConvergenceError):
    """Raised when a Newton step encounters a (numerically) singular Jacobian."""


class ToleranceError(RuntimeError):
    """Raised when a quadrature cannot meet the requested tolerance.

    Attributes:
        value: the best value achieved.
        error_estimate: the achieved absolute error estimate.
    """

    def __init__(self, message, value, error_estimate):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and structure hints for adaptive quadrature.

    Attributes:
        abs_tol: absolute tolerance on the integral value.
        rel_tol: relative tolerance on the integral value.
        max_subdivisions: adaptive subdivision budget per segment.
        split_points: interior points the integration must split at
            (kinks, near-singularities, scale changes).
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    split_points: tuple[float, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class RootBracket:
    """A sign-change bracket [lo, hi] for scalar root finding."""

    lo: float
    hi: float
    tol: float = 1e-14

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise BracketError(f"empty bracket [{self.lo}, {self.hi}]")
        if self.tol <= 0:
            raise BracketError("bracket tolerance must be positive")


_INV_E = math.exp(-1.0)


def lambert_w0(x):
    """Principal branch W_0 of the Lambert W function, W e^W = x.

    Valid for x >= -1/e; raises DomainError below the branch point. Uses a
    branch-point / asymptotic-aware initial guess followed by Halley
    iteration, giving relative error at the 1e-15 level across the domain.
    """
    x = float(x)
    if x < -_INV_E:
        if x > -_INV_E - 1e-15:  # roundoff at the branch point
            x = -_INV_E
        else:
            raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0

    # Initial guess.
    if x < -0.25:
        # Series around the branch point in q = sqrt(2(1 + e x)).
        q = math.sqrt(2.0 * (1.0 + math.e * x))
        w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q ** 3
    elif x < 3.0:
        # log1p(x) matches W to second order at 0 and stays the right sign.
        w = math.log1p(x)
    else:
        lx = math.log(x)
        llx = math.log(lx)
        w = lx - llx + llx / lx

    # Halley iteration.
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        if abs(w_new - w) <= 2e-16 * max(1.0, abs(w_new)):
            return w_new
        w = w_new
    raise ConvergenceError(f"lambert_w0 did not converge for x={x}")


def find_root(f, bracket):
    """Find the root of a scalar function inside a RootBracket.

    Validates the sign change up front (BracketError otherwise) and runs
    Brent's method to the bracket's tolerance (ConvergenceError on failure).
    """
    flo = f(bracket.lo)
    fhi = f(bracket.hi)
    if flo == 0.0:
        return bracket.lo
    if fhi == 0.0:
        return bracket.hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: "
            f"f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    try:
        root, res = optimize.brentq(
            f, bracket.lo, bracket.hi, xtol=bracket.tol, rtol=8.9e-16,
            maxiter=200, full_output=True,
        )
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    if not res.converged:
        raise ConvergenceError(f"brentq failed on [{bracket.lo}, {bracket.hi}]")
    return root


def newton_solve(G, x0, tol=1e-12, max_iter=60, jac=None):
    """Solve G(x) = 0 by damped Newton iteration.

    Args:
        G: callable mapping ndarray(n) -> ndarray(n).
        x0: initial guess.
        tol: convergence threshold on the sup norm of G.
        max_iter: maximum full Newton iterations.
        jac: optional callable returning the n x n Jacobian; finite
            differences are used when omitted.

    The step is halved (up to 30 times) until the residual sup norm does not
    increase. Raises SingularJacobianError if the linearized system cannot be
    solved, ConvergenceError if the tolerance is not met.
    """
    x = np.asarray(x0, dtype=float).copy()
    g = np.asarray(G(x), dtype=float)
    norm = float(np.max(np.abs(g)))
    if norm <= tol:
        return x
    n = x.size
    for _ in range(max_iter):
        if jac is not None:
            J = np.asarray(jac(x), dtype=float)
        else:
            J = np.empty((n, n))
            for j in range(n):
                h = 1e-7 * max(1.0, abs(x[j]))
                xp = x.copy()
                xp[j] += h
                J[:, j] = (np.asarray(G(xp), dtype=float) - g) / h
        # Row equilibration: makes convergence independent of equation scaling.
        scale = np.max(np.abs(J), axis=1)
        if not np.all(np.isfinite(scale)) or np.any(scale == 0.0):
            raise SingularJacobianError("Jacobian has a zero or non-finite row")
        try:
            step = np.linalg.solve(J / scale[:, None], g / scale)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(str(exc)) from exc
        lam = 1.0
        for _ in range(30):
            x_new = x - lam * step
            g_new = np.asarray(G(x_new), dtype=float)
            norm_new = float(np.max(np.abs(g_new)))
            if np.isfinite(norm_new) and norm_new <= norm:
                break
            lam *= 0.5
        else:
            raise ConvergenceError("Newton step halving exhausted (30 halvings)")
        x, g, norm = x_new, g_new, norm_new
        if norm <= tol:
            return x
    raise ConvergenceError(f"Newton did not reach tol={tol}: residual {norm:.3g}")


def _quad_segment(f, a, b, spec):
    value, err = integrate.quad(
        f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
    )
    return value, err


def integrate_halfline(f, spec=None):
    """Integrate f over [0, infinity) with mandatory splits and a mapped tail.

    Finite segments between 0 and the split points are integrated adaptively;
    the tail beyond the last split point is mapped to a finite interval via
    t = u / (1 - u) and integrated adaptively there. Raises ToleranceError
    (carrying the achieved value and error estimate) when the combined error
    estimate exceeds the requested tolerance.
    """
    if spec is None:
        spec = QuadratureSpec()
    splits = sorted(p for p in spec.split_points if p > 0.0)
    total = 0.0
    err_total = 0.0
    lo = 0.0
    for p in splits:
        v, e = _quad_segment(f, lo, p, spec)
        total += v
        err_total += e
        lo = p

    def tail(u):
        t = u / (1.0 - u)
        return f(t) / (1.0 - u) ** 2

    u_lo = lo / (1.0 + lo)
    v, e = _quad_segment(tail, u_lo, 1.0, spec)
    total += v
    err_total += e

    allowed = max(spec.abs_tol, spec.rel_tol * abs(total))
    if err_total > allowed:
        raise ToleranceError(
            f"half-line quadrature error estimate {err_total:.3g} exceeds "
            f"allowed {allowed:.3g}",
            value=total,
            error_estimate=err_total,
        )
    return total
