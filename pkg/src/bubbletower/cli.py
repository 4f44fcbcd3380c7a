"""Command-line front end.

Subcommands
-----------
params     solve the full parameter system and report structural checks
profiles   build correction profiles for one alpha and report constants
integrals  closed-form integral table, z-moments and the I_alpha check
residual   weighted residual norms over a p-list with fitted slope
matrix     relation-matrix determinant and recursion check
barriers   barrier constants and all barrier inequalities
all        run every command with defaults and aggregate pass/fail

Exit codes: 0 when every asserted invariant passes, 1 on a check
failure, 2 on a usage error.

JSON output is deterministic: fixed field ordering (insertion order of
the report dicts) and shortest round-trip float formatting.  CSV output
uses a header row naming the tower symbols (alpha_j, s_j, b_j,
ln_delta_j, tau_j).  A simple ``key=value`` config file may supply any
flag default; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .numerics import DomainError, ToleranceError
from .params import solve_full_system, check_structural_properties
from .profiles import correction_profiles
from .integrals import (verify_elementary_table, z_identities,
                        closed_form_I, I_alpha_quadrature, flux_corrected_I)
from .tower import (build_tower, residual_scan, nodal_count,
                    potential_bound_check, DEFAULT_ETA)
from .linearized import (build_matrix, det_and_recursion_check,
                         default_barrier_config, barrier_under_check,
                         barrier_over_check, psi_profiles_check,
                         mass_decomp_check, supersolution_check)


def _clean(obj):
    """Recursively convert numpy scalars/arrays for JSON emission."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(report, args, csv_rows=None, csv_header=None):
    """Write the report as JSON (default) or CSV to --out or stdout."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        if csv_rows is None:
            w.writerow(["key", "value"])
            for k, v in _flatten(report):
                w.writerow([k, v])
        else:
            w.writerow(csv_header)
            for row in csv_rows:
                w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(_clean(report), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, prefix + str(k) + ".")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        for i, v in enumerate(obj):
            yield from _flatten(v, prefix + str(i) + ".")
    else:
        yield prefix[:-1], obj


def _params_report(k, p):
    ps = solve_full_system(k, p)
    checks = check_structural_properties(ps)
    report = {
        "command": "params", "k": k, "p": p,
        "alpha": list(map(float, ps.alpha)),
        "s": list(map(float, ps.s)),
        "eps": list(map(float, ps.eps)),
        "b": list(map(float, ps.b)),
        "ln_delta": list(map(float, ps.ln_delta)),
        "ln_C": list(map(float, ps.ln_C)),
        "tau": list(map(float, ps.tau)),
        "c": list(map(float, ps.c)),
        "corr0": list(map(float, ps.corr0)),
        "corr1": list(map(float, ps.corr1)),
        "checks": {name: {"passed": bool(v[0]), "detail": str(v[1])}
                   for name, v in checks.items()},
        "ok": all(v[0] for v in checks.values()),
    }
    rows = [[j + 1, ps.alpha[j], (ps.s[j] if j < k - 1 else ""),
             ps.b[j], ps.ln_delta[j], ps.tau[j]] for j in range(k)]
    return report, rows, ["j", "alpha_j", "s_j", "b_j", "ln_delta_j",
                          "tau_j"]


def _profiles_report(alpha, grid_n):
    w0, w1, *_ = correction_profiles(alpha)

    def slope(prof):
        ln_r = np.log(np.asarray(prof.grid, dtype=float))
        mask = ln_r >= ln_r[-1] - math.log(10.0)
        vals = np.asarray(prof.values, dtype=float)[mask]
        return float(np.polyfit(ln_r[mask], vals, 1)[0])

    s0, s1 = slope(w0), slope(w1)
    ok = (abs(s0 - w0.C_F) <= 1e-3 * abs(w0.C_F)
          and abs(s1 - w1.C_F) <= 1e-3 * abs(w1.C_F))
    report = {
        "command": "profiles", "alpha": alpha,
        "C_F0": w0.C_F, "C_F1": w1.C_F,
        "w0_at_0": w0.w_at_0, "w1_at_0": w1.w_at_0,
        "last_decade_slope_w0": s0, "last_decade_slope_w1": s1,
        "ok": ok,
    }
    r = np.geomspace(w0.grid[0], w0.grid[-1], grid_n)
    rows = [[float(ri), float(w0(ri)), float(w1(ri))] for ri in r]
    return report, rows, ["r", "w0", "w1"]


def _integrals_report(alpha):
    table = [r.as_dict() for r in verify_elementary_table()]
    zics = [r.as_dict() for r in z_identities(alpha)]
    w0 = correction_profiles(alpha)[0]
    quad = I_alpha_quadrature(alpha, w0)
    corrected = flux_corrected_I(alpha, w0)
    rel_corr = abs(quad.quadrature_value - corrected) / abs(corrected)
    ok = (all(r["abs_err"] <= 1e-10 for r in table)
          and zics[0]["abs_err"] <= 1e-8 and zics[1]["abs_err"] <= 1e-8
          and rel_corr <= 1e-5)
    report = {
        "command": "integrals", "alpha": alpha,
        "elementary_table": table,
        "z_identities": zics,
        "I_alpha": {
            "quadrature": quad.quadrature_value,
            "closed_form": quad.closed_form,
            "flux_corrected_closed_form": corrected,
            "rel_err_vs_closed_form": quad.rel_err,
            "rel_err_vs_flux_corrected": rel_corr,
        },
        "ok": ok,
    }
    rows = ([[r["name"], r["quadrature_value"], r["closed_form"],
              r["abs_err"]] for r in table + zics]
            + [["I_alpha", quad.quadrature_value, corrected, rel_corr]])
    return report, rows, ["name", "quadrature", "closed_form", "abs_err"]


def _residual_report(k, p_list, eta, grid_n):
    scan = residual_scan(k, p_list, eta=eta, n_per_annulus=grid_n)
    ok = -4.8 <= scan.slope <= -3.2
    report = {
        "command": "residual", "k": k,
        "p_values": list(map(float, scan.p_values)),
        "norms": list(map(float, scan.norms)),
        "sup_ln_r": [[float(x) for x in row] for row in scan.sup_ln_r],
        "slope": float(scan.slope),
        "ok": ok,
    }
    rows = [[p, n] for p, n in zip(scan.p_values, scan.norms)]
    return report, rows, ["p", "weighted_norm"]


def _matrix_report(k, p, tol):
    ps = solve_full_system(k, p)
    tm = build_matrix(ps)
    res = det_and_recursion_check(tm, tol=tol)
    report = {
        "command": "matrix", "k": k, "p": p,
        "I_alpha": [closed_form_I(a) for a in ps.alpha],
        "det": res["det"],
        "recursion_defect": res["recursion_defect"],
        "ok": bool(res["positive"] and res["recursion_defect"] <= tol),
    }
    return report, None, None


def _barriers_report(k, p, eta):
    ps = solve_full_system(k, p)
    ta = build_tower(ps, eta=eta)
    C_bar = potential_bound_check(ta)["C_bar"]
    cfg = default_barrier_config(ps, C_bar, eta=eta)
    under = [barrier_under_check(cfg, ps, j) for j in range(1, k + 1)]
    over = [barrier_over_check(cfg, ps, j) for j in range(1, k + 1)]
    psis = [psi_profiles_check(cfg, ps, j) for j in range(1, k + 1)]
    mass = mass_decomp_check(ps, cfg)
    combined = [supersolution_check(cfg, ps, C_bar, j)
                for j in range(1, k + 1)]
    ok = (all(r["ok"] for r in under + over + psis + combined)
          and mass["ok"])
    report = {
        "command": "barriers", "k": k, "p": p, "eta": cfg.eta,
        "C_bar": C_bar, "D": cfg.D_under,
        "R_tilde": list(cfg.R_tilde), "r_tilde": list(cfg.r_tilde),
        "under": under, "over": over, "psi": psis,
        "mass_decomp": mass, "supersolution": combined,
        "ok": ok,
    }
    return report, None, None


def _tower_report(k, p, eta, grid_n):
    ps = solve_full_system(k, p)
    ta = build_tower(ps, eta=eta)
    report = {
        "command": "tower", "k": k, "p": p,
        "nodal_count": nodal_count(ta),
        "potential_bound": potential_bound_check(ta),
        "ok": nodal_count(ta) == k,
    }
    return report, None, None


def _read_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bubbletower",
        description="Construct and verify the tower-of-bubbles "
                    "approximate solution at desk scale.")
    ap.add_argument("command", choices=["params", "profiles", "integrals",
                                        "residual", "matrix", "barriers",
                                        "all"])
    ap.add_argument("--k", type=int, default=2, help="number of bubbles")
    ap.add_argument("--p", type=float, default=100.0, help="exponent p")
    ap.add_argument("--p-list", type=str, default=None,
                    help="comma-separated p values (residual command)")
    ap.add_argument("--alpha", type=float, default=2.0,
                    help="profile/integral parameter alpha")
    ap.add_argument("--eta", type=float, default=DEFAULT_ETA,
                    help="weight exponent eta in (0,1)")
    ap.add_argument("--tol", type=float, default=1e-10,
                    help="tolerance for the recursion check")
    ap.add_argument("--grid", type=int, default=512,
                    help="samples per annulus / profile rows")
    ap.add_argument("--out", type=str, default=None, help="output path")
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    ap.add_argument("--config", type=str, default=None,
                    help="key=value file supplying flag defaults")
    return ap


def _validate(args):
    if args.k < 1:
        raise SystemExit("--k must be >= 1")
    if args.p <= 1.0:
        raise SystemExit("--p must be > 1")
    if not 0.0 < args.eta < 1.0:
        raise SystemExit("--eta must lie in (0, 1)")
    if args.alpha < 2.0:
        raise SystemExit("--alpha must be >= 2")


def _dispatch(args):
    if args.command == "params":
        return _params_report(args.k, args.p)
    if args.command == "profiles":
        return _profiles_report(args.alpha, args.grid)
    if args.command == "integrals":
        return _integrals_report(args.alpha)
    if args.command == "residual":
        if args.p_list:
            p_list = [float(x) for x in args.p_list.split(",")]
        else:
            p_list = [40.0, 80.0, 160.0, 320.0]
        return _residual_report(args.k, p_list, args.eta, args.grid)
    if args.command == "matrix":
        return _matrix_report(args.k, args.p, args.tol)
    if args.command == "barriers":
        return _barriers_report(args.k, args.p, args.eta)
    raise SystemExit("unknown command %r" % args.command)


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        cfg = _read_config(args.config)
        explicit = {a.split("=")[0].lstrip("-").replace("-", "_")
                    for a in (argv if argv is not None else sys.argv[1:])
                    if a.startswith("--")}
        for key, val in cfg.items():
            if key in explicit or not hasattr(args, key):
                continue
            cur = getattr(args, key)
            typ = type(cur) if cur is not None else str
            setattr(args, key, typ(val) if typ is not type(None) else val)
    try:
        _validate(args)
    except SystemExit as exc:
        print(str(exc), file=sys.stderr)
        return 2

    try:
        if args.command == "all":
            subreports = {}
            for name, fn in (
                    ("params", lambda: _params_report(args.k, args.p)),
                    ("profiles", lambda: _profiles_report(args.alpha,
                                                          args.grid)),
                    ("integrals", lambda: _integrals_report(args.alpha)),
                    ("tower", lambda: _tower_report(args.k, args.p,
                                                    args.eta, args.grid)),
                    ("matrix", lambda: _matrix_report(args.k, args.p,
                                                      args.tol)),
                    ("barriers", lambda: _barriers_report(args.k, args.p,
                                                          args.eta))):
                subreports[name] = fn()[0]
            report = {
                "command": "all",
                "reports": subreports,
                "ok": all(r["ok"] for r in subreports.values()),
            }
            rows, header = None, None
        else:
            report, rows, header = _dispatch(args)
    except (DomainError, ToleranceError) as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 1

    try:
        _emit(report, args, csv_rows=rows, csv_header=header)
    except OSError as exc:
        print("i/o error writing %s: %s" % (args.out, exc),
              file=sys.stderr)
        return 1
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
