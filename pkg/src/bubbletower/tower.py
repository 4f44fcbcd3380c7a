"""Assembly of the alternating tower approximation on the unit disk.

The approximate solution is

    U_p = sum_j tau_j (-1)^(j-1) P(U_{alpha_j, delta_j} + w0_j/p + w1_j/p^2)

where P is the disk projection (for radial pieces P f = f - f(1), since the
harmonic extension of constant boundary data is that constant).  All radii
are handled as ln r: the concentration scales delta_j = C_j e^{-b_j p} are
sub-denormal already for moderate p, but every bubble, mass and weight
factor has a closed log-space form built from logaddexp, so each assembled
quantity is O(1) after the per-annulus rescaling.

The weighted residual |rho_p (Delta U_p + g_p(U_p))| uses the annulus
weight rho_j(x) = delta_j^2 (1 + |x/delta_j|^{2+eta}); the large exponents
in g_p(U_p) = sign(U_p) |U_p|^p are cancelled analytically against the
amplitude constraint p ln p + (p-1) ln tau_j + 2 ln delta_j = 0 before any
exponential is taken.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics import DomainError, find_root, RootBracket
from .params import ParamSet, solve_full_system
from .profiles import (correction_profiles, phi0, phi1, V_alpha_ln,
                       RadialProfile)

DEFAULT_ETA = 0.5


@dataclass(frozen=True)
class AnnulusPartition:
    """Log-radius partition of the disk into per-bubble annuli.

    A_j = {ln_inner[j] < ln r <= ln_outer[j]} with ln_inner[0] = -inf and
    ln_outer[k-1] = 0.  B_j is the level set V_{alpha_j}(x/delta_j) > -p/2
    whose exact log-radii are found by root bracketing; the construction
    requires B_j subset A_j.
    """

    k: int
    ln_inner: tuple
    ln_outer: tuple
    ln_B_inner: tuple
    ln_B_outer: tuple

    def annulus_of(self, ln_r):
        """Index j (0-based) of the annulus containing ln r <= 0."""
        for j in range(self.k):
            if ln_r <= self.ln_outer[j]:
                return j
        raise DomainError("ln r = %g outside the unit disk" % ln_r)


@dataclass(frozen=True)
class TowerApprox:
    """Immutable assembled tower: parameters, profiles and partition."""

    params: ParamSet
    profiles: tuple          # per-j (w0, w1) RadialProfiles
    partition: AnnulusPartition
    eta: float = DEFAULT_ETA


@dataclass(frozen=True)
class ResidualScan:
    """Weighted residual norms over a family of exponents p."""

    k: int
    p_values: tuple
    norms: tuple
    sup_ln_r: tuple          # per p: per-annulus location of the sup
    slope: float


def _v_ln(alpha, ln_rho):
    """V_alpha(ln rho), scalar and stable for any ln rho."""
    return (math.log(2.0 * alpha * alpha)
            - 2.0 * np.logaddexp(0.0, alpha * ln_rho)
            + (alpha - 2.0) * ln_rho)


def build_partition(ps, half_level=None):
    """Annuli A_j and level sets B_j for a solved parameter set.

    A_j boundaries interpolate consecutive concentration scales in logs,
    ln_outer[j] = eps_j ln delta_j + (1 - eps_j) ln delta_{j+1}; B_j is
    the exact level set V_{alpha_j}((x/delta_j)) > -p/2 computed by root
    finding in ln rho.  Raises DomainError if any B_j escapes A_j (which
    would indicate a failed parameter solve).
    """
    k, p = ps.k, ps.p
    level = -0.5 * p if half_level is None else half_level
    d = ps.ln_delta
    ln_outer = [ps.eps[j] * d[j] + (1.0 - ps.eps[j]) * d[j + 1]
                for j in range(k - 1)] + [0.0]
    ln_inner = [-math.inf] + ln_outer[:-1]

    b_in, b_out = [], []
    for j in range(k):
        al = ps.alpha[j]

        def f(x):
            return _v_ln(al, x) - level

        # outer root: V decays like -(alpha+2) ln rho for rho > 1
        hi = (-level + math.log(2 * al * al) + 10.0) / (al + 2.0) + 10.0
        x_out = find_root(f, RootBracket(1e-12, hi))
        if al > 2.0:
            # inner root: V ~ (alpha-2) ln rho as rho -> 0
            lo = (level - math.log(2 * al * al)) / (al - 2.0) - 10.0
            x_in = find_root(f, RootBracket(lo, -1e-12))
        else:
            x_in = -math.inf   # V(0) = ln 8 > level: B_1 reaches the origin
        b_in.append(d[j] + x_in if math.isfinite(x_in) else -math.inf)
        b_out.append(d[j] + x_out)

    part = AnnulusPartition(k, tuple(ln_inner), tuple(ln_outer),
                            tuple(b_in), tuple(b_out))
    for j in range(k):
        if not (part.ln_B_inner[j] >= part.ln_inner[j] - 1e-12
                and part.ln_B_outer[j] <= part.ln_outer[j] + 1e-12):
            raise DomainError(
                "B_%d = [%g, %g] not inside A_%d = [%g, %g]"
                % (j + 1, part.ln_B_inner[j], part.ln_B_outer[j],
                   j + 1, part.ln_inner[j], part.ln_outer[j]))
    return part


def build_tower(ps, eta=DEFAULT_ETA):
    """Assemble the TowerApprox for a solved parameter set."""
    if ps.s:
        s1 = ps.s[0]
    else:
        # single bubble: the weight-boundedness threshold still uses the
        # first link root zeta_2(s) = 0 (s_1 ~ 0.4775)
        from .params import zeta, s_bounds
        s1 = find_root(lambda s: zeta(2.0, s), RootBracket(*s_bounds(2.0)))
    if not (0.0 < eta <= min(1.0, 2.0 * s1)):
        raise DomainError("eta = %g outside (0, min(1, 2 s_1)]" % eta)
    profs = tuple((correction_profiles(al)[0], correction_profiles(al)[1])
                  for al in ps.alpha)
    return TowerApprox(ps, profs, build_partition(ps), eta)


def _pu_ln(alpha, ln_delta, t):
    """Projected bubble P U_{alpha,delta} at ln r = t (exact log form)."""
    ad = alpha * ln_delta
    return 2.0 * (np.logaddexp(ad, 0.0) - np.logaddexp(ad, alpha * t))


def eval_tower_ln(ta, ln_r):
    """U_p at log-radius ln_r (array), assembled from exact projections."""
    t = np.atleast_1d(np.asarray(ln_r, dtype=float))
    if np.any(t > 1e-12):
        raise DomainError("evaluation point outside the closed unit disk")
    ps = ta.params
    p = ps.p
    out = np.zeros_like(t)
    for i in range(ps.k):
        d = ps.ln_delta[i]
        w0, w1 = ta.profiles[i]
        lr = t - d
        pw0 = w0.eval_ln(lr) - w0.eval_ln(-d)
        pw1 = w1.eval_ln(lr) - w1.eval_ln(-d)
        piece = _pu_ln(ps.alpha[i], d, t) + pw0 / p + pw1 / p ** 2
        out += ps.tau[i] * (-1.0) ** i * piece
    return out[0] if np.ndim(ln_r) == 0 else out


def eval_tower(ta, j, y):
    """U_p at x = delta_j * y for y rescaled to annulus j (1-based j)."""
    d = ta.params.ln_delta[j - 1]
    return eval_tower_ln(ta, d + np.log(np.asarray(y, dtype=float)))


def _log_rho(t, d_j, eta):
    """ln of the annulus weight rho_j = delta_j^2 (1 + |x/delta_j|^{2+eta})."""
    return np.logaddexp((2.0 + eta) * d_j, (2.0 + eta) * t) - eta * d_j


def _r2_lap_terms(ta, t):
    """r^2 * Delta U_p as sum over bubbles, each in an exact log form.

    Returns (ln_kernel[i], factor[i]) per point so that
    r^2 Delta U_p = sum_i tau_i (-1)^i ... = sum_i sign_i exp(ln_kernel_i)
    * factor_i; the kernel is r^2 delta_i^{-2} e^{V(y_i)} and the factor
    is -1 + (phi0(V) - w0)/p + (phi1(V, w0) - w1)/p^2 from the profile
    equations (the disk projection adds only a harmonic constant).
    """
    ps = ta.params
    p = ps.p
    pieces = []
    for i in range(ps.k):
        al, d = ps.alpha[i], ps.ln_delta[i]
        w0, w1 = ta.profiles[i]
        lr = t - d
        a = 0.5 * al * lr
        # r^2 delta^{-2} e^{V(y)} = (alpha^2/2) sech^2(alpha ln(rho) / 2)
        ln_k = (math.log(0.5 * al * al) + math.log(4.0)
                - 2.0 * np.logaddexp(a, -a))
        V = V_alpha_ln(al, lr)
        w0v = w0.eval_ln(lr)
        w1v = w1.eval_ln(lr)
        fac = (-1.0 + (phi0(V) - w0v) / p
               + (phi1(V, w0v) - w1v) / p ** 2)
        pieces.append((ps.tau[i] * (-1.0) ** i, ln_k, fac))
    return pieces


def residual_ln(ta, ln_r, j=None):
    """Weighted residual rho_p (Delta U_p + g_p(U_p)) at log-radii ln_r.

    Every contribution is combined in log space before a single exp; the
    amplitude constraint cancels the p ln(tau_j p) block of ln g_p
    analytically.  Raises DomainError if any combined exponent exceeds
    +/-700 after the rescaling (a coordinate bug, not a math fact).
    """
    t = np.atleast_1d(np.asarray(ln_r, dtype=float))
    ps = ta.params
    p = ps.p
    part = ta.partition
    if j is None:
        jj = np.array([part.annulus_of(x) for x in t])
    else:
        jj = np.full(t.shape, j - 1, dtype=int)
    d_j = np.asarray(ps.ln_delta)[jj]
    tau_j = np.asarray(ps.tau)[jj]
    lrho = _log_rho(t, d_j, ta.eta)

    out = np.zeros_like(t)
    for sign_i, ln_k, fac in _r2_lap_terms(ta, t):
        expo = lrho - 2.0 * t + ln_k
        if np.any(expo > 700.0):
            raise DomainError("rescaled exponent overflow in Delta U_p")
        out += sign_i * np.exp(np.maximum(expo, -745.0)) * fac

    up = eval_tower_ln(ta, t)
    u_rel = np.abs(up) / (tau_j * p)
    with np.errstate(divide="ignore"):
        ln_g = p * np.log(u_rel) - 2.0 * d_j + np.log(tau_j)
    expo = lrho + ln_g
    if np.any(expo > 700.0):
        raise DomainError("rescaled exponent overflow in g_p(U_p)")
    out += np.sign(up) * np.exp(np.maximum(expo, -745.0))
    return out[0] if np.ndim(ln_r) == 0 else out


def residual_at(ta, j, y):
    """rho_p R_p at x = delta_j y, for y in annulus j coordinates."""
    d = ta.params.ln_delta[j - 1]
    return residual_ln(ta, d + np.log(np.asarray(y, dtype=float)), j=j)


def _annulus_grid(ta, j, n):
    """Log-radius sample of annulus j (0-based), refined near B_j edges."""
    part = ta.partition
    lo = part.ln_inner[j]
    if not math.isfinite(lo):
        lo = part.ln_B_inner[j]
        if not math.isfinite(lo):
            lo = ta.params.ln_delta[j] - 30.0
        else:
            lo -= 10.0
    hi = min(part.ln_outer[j], -1e-9)
    pts = [np.linspace(lo, hi, n)]
    width = (hi - lo) / n * 8.0
    for edge in (part.ln_B_inner[j], part.ln_B_outer[j]):
        if math.isfinite(edge) and lo < edge < hi:
            pts.append(np.linspace(max(lo, edge - width),
                                   min(hi, edge + width), 4 * 8))
    return np.unique(np.concatenate(pts))


def weighted_norm(ta, n_per_annulus=512, details=False):
    """sup |rho_p R_p| over a per-annulus log-radius grid.

    With details=True returns (norm, per-annulus (sup value, ln r) list).
    """
    sups = []
    for j in range(ta.params.k):
        g = _annulus_grid(ta, j, n_per_annulus)
        vals = np.abs(residual_ln(ta, g))
        i = int(np.argmax(vals))
        sups.append((float(vals[i]), float(g[i])))
    norm = max(s for s, _ in sups)
    return (norm, sups) if details else norm


def residual_scan(k, p_values, eta=DEFAULT_ETA, n_per_annulus=512):
    """Weighted residual norms for one k over several p, with slope fit.

    Parallelizes over p with at most BTL_THREADS workers (default 1).
    """
    p_values = tuple(float(p) for p in p_values)

    def one(p):
        ta = build_tower(solve_full_system(k, p), eta=eta)
        return weighted_norm(ta, n_per_annulus, details=True)

    n_workers = max(1, int(os.environ.get("BTL_THREADS", "1")))
    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as ex:
            results = list(ex.map(one, p_values))
    else:
        results = [one(p) for p in p_values]
    norms = tuple(r[0] for r in results)
    sup_ln_r = tuple(tuple(x for _, x in r[1]) for r in results)
    slope = float(np.polyfit(np.log(p_values), np.log(norms), 1)[0])
    return ResidualScan(k, p_values, norms, sup_ln_r, slope)


def nodal_count(ta, n=4096):
    """Number of sign-alternating radial regions of U_p."""
    lo = ta.params.ln_delta[0] - 20.0
    t = np.linspace(lo, -1e-9, n * ta.params.k)
    s = np.sign(eval_tower_ln(ta, t))
    s = s[s != 0.0]
    return int(1 + np.count_nonzero(s[1:] != s[:-1]))


def laplacian_consistency(ta, n_points=48, h=2e-3):
    """max |FD(U_p)'' - r^2 Delta U_p| / scale on sample points.

    In log coordinates r^2 Delta f = d^2 f / d(ln r)^2 for radial f, so a
    central second difference of the assembled tower must match the
    analytic per-bubble Laplacian (the projection constants drop out).
    """
    ps = ta.params
    worst = 0.0
    for j in range(ps.k):
        t = np.linspace(ps.ln_delta[j] - 3.0, ps.ln_delta[j] + 3.0, n_points)
        fd = (eval_tower_ln(ta, t + h) - 2.0 * eval_tower_ln(ta, t)
              + eval_tower_ln(ta, t - h)) / h ** 2
        ana = np.zeros_like(t)
        for sign_i, ln_k, fac in _r2_lap_terms(ta, t):
            ana += sign_i * np.exp(ln_k) * fac
        scale = np.max(np.abs(ana)) + 1.0
        worst = max(worst, float(np.max(np.abs(fd - ana)) / scale))
    return worst


def gp_consistency(ta, j, n=256):
    """sup over B_j of the normalized nonlinearity expansion defect.

    Compares g_p(U_p) against (-1)^(j-1) tau_j |x|^{alpha_j-2} e^{U_j}
    * [1 + (w0 - phi0(V))/p + (w1 - phi1(V, w0))/p^2]; the defect obeys
    a (|V|^6 + 1)/p^3 envelope, so the returned sup of
    defect / ((|V|^6 + 1)/p^3) should stay bounded and shrink with p.
    """
    ps = ta.params
    p = ps.p
    part = ta.partition
    jj = j - 1
    al, d, tau = ps.alpha[jj], ps.ln_delta[jj], ps.tau[jj]
    lo = part.ln_B_inner[jj]
    if not math.isfinite(lo):
        lo = d - 10.0
    t = np.linspace(lo + 1e-9, part.ln_B_outer[jj] - 1e-9, n)
    lr = t - d
    w0, w1 = ta.profiles[jj]
    V = V_alpha_ln(al, lr)
    w0v, w1v = w0.eval_ln(lr), w1.eval_ln(lr)

    up = eval_tower_ln(ta, t)
    # ln of tau_j |x|^{alpha-2} e^{U_j} = ln(tau_j) - 2 ln(delta_j) + V(y)
    ln_mass = math.log(tau) - 2.0 * d + V
    ln_g = p * np.log(np.abs(up) / (tau * p)) - 2.0 * d + math.log(tau)
    ratio = np.sign(up) * (-1.0) ** jj * np.exp(ln_g - ln_mass)
    model = 1.0 + (w0v - phi0(V)) / p + (w1v - phi1(V, w0v)) / p ** 2
    envelope = (np.abs(V) ** 6 + 1.0) / p ** 3
    return float(np.max(np.abs(ratio - model) / envelope))


def potential_bound_check(ta, n_per_annulus=512):
    """Realized constants of the potential comparison and V >= -p - C.

    Returns a dict with 'C_bar' (sup over the grid of
    p |U_p|^{p-1} / (|x|^{alpha_j - 2} e^{U_j}) on each A_j) and 'C_low'
    (per-annulus realized C in V_{alpha_j} >= -p - C); both should stay
    O(1) as p grows.
    """
    ps = ta.params
    p = ps.p
    cbar = 0.0
    clow = []
    for j in range(ps.k):
        al, d, tau = ps.alpha[j], ps.ln_delta[j], ps.tau[j]
        t = _annulus_grid(ta, j, n_per_annulus)
        lr = t - d
        V = V_alpha_ln(al, lr)
        up = eval_tower_ln(ta, t)
        # ln W_p = ln(p |U_p|^{p-1}) with the constraint substituted:
        # (p-1) ln(tau_j p) = -2 ln delta_j - ln p
        ln_w = (p - 1.0) * np.log(np.abs(up) / (tau * p)) - 2.0 * d
        ln_mass = V - 2.0 * d
        cbar = max(cbar, float(np.max(np.exp(ln_w - ln_mass))))
        clow.append(float(np.max(-V) - p))
    return {"C_bar": cbar, "C_low": tuple(clow)}


def boundary_gauge_check(ta):
    """Cross-annulus agreement of U_p at the shared A_j boundaries.

    Evaluates U_p at each interior boundary through the rescaled
    coordinates of both adjacent annuli; returns the max relative gap.
    """
    ps = ta.params
    worst = 0.0
    for j in range(ps.k - 1):
        tb = ta.partition.ln_outer[j]
        y_left = math.exp(tb - ps.ln_delta[j])
        y_right = math.exp(tb - ps.ln_delta[j + 1])
        a = float(eval_tower(ta, j + 1, y_left))
        b = float(eval_tower(ta, j + 2, y_right))
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1.0))
    return worst


def tower_table(ta, n_per_annulus=256):
    """Columns (j, ln_r, U_p, rho_R) over the partition, for CSV export."""
    rows = {"j": [], "ln_r": [], "U_p": [], "rho_R": []}
    for j in range(ta.params.k):
        t = _annulus_grid(ta, j, n_per_annulus)
        rows["j"].extend([j + 1] * len(t))
        rows["ln_r"].extend(t.tolist())
        rows["U_p"].extend(eval_tower_ln(ta, t).tolist())
        rows["rho_R"].extend(residual_ln(ta, t, j=j + 1).tolist())
    return {k: np.asarray(v) for k, v in rows.items()}
