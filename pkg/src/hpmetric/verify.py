"""Executable invariant suites bundling the library's proved properties.

Levels: 'identity' (balance, submultiplicativity, fast/reference agreement),
'metric' (axioms per beta), 'quotient' (degeneracy collapse and distance
bounds), 'oracle' (Monte Carlo agreement with the exact solver).  Each check
reports its observed value, tolerance, and pass flag.
"""

from __future__ import annotations

import numpy as np

from .graphs import TransitionMatrix
from .hitting import (hitting_fast, hitting_reference, simulate_hit_before_return,
                      simulate_visit_counts)
from .metric import degenerate_pairs, hp_distance, hp_similarity, verify_metric_axioms
from .quotient import (check_quotient_bounds, order_class, quotient_from_report,
                       segments)
from .rng import stream
from .stationary import stationary_distribution

LEVELS = ("identity", "metric", "quotient", "oracle")

BALANCE_TOL = 1e-10
SUBMULT_TOL = 1e-10
FAST_REF_TOL = 1e-8
SYMMETRY_TOL = 1e-10
TRIANGLE_TOL = 1e-9
QUOTIENT_TOL = 1e-9

# Absolute guard added to 4-sigma Monte Carlo bands: the exact solver itself
# only carries ~1e-10 accuracy, so deterministic pairs (SE = 0) must not fail
# on representation noise.
MC_GUARD = 1e-9


def _check(value, tol, ok=None):
    if ok is None:
        ok = bool(value <= tol)
    return {"value": float(value), "tolerance": tol, "ok": bool(ok)}


def submultiplicativity_slack(Q: np.ndarray) -> float:
    """Worst violation of Q[i,j] >= Q[i,k] Q[k,j] over distinct triples."""
    n = Q.shape[0]
    worst = -np.inf
    mask_diag = np.eye(n, dtype=bool)
    for k in range(n):
        viol = np.outer(Q[:, k], Q[k, :]) - Q
        viol[k, :] = -np.inf
        viol[:, k] = -np.inf
        viol[mask_diag] = -np.inf
        worst = max(worst, float(viol.max()))
    return worst


def level_identity(tm: TransitionMatrix, max_reference_n: int = 300) -> dict:
    phi = stationary_distribution(tm)
    hp = hitting_fast(tm)
    Q = hp.Q
    balance = np.abs(Q * phi.phi[:, None] - Q.T * phi.phi[None, :]).max()
    submult = submultiplicativity_slack(Q)
    if tm.n <= max_reference_n:
        cols = range(tm.n)
    else:
        cols = stream(0, tm.n).choice(tm.n, size=10, replace=False)
    ref_err = 0.0
    for j in cols:
        ref_err = max(ref_err, float(np.abs(hitting_reference(tm, int(j)) - Q[:, j]).max()))
    return {
        "row_sums": _check(np.abs(tm.P.sum(axis=1) - 1.0).max(), 1e-12),
        "stationary_residual": _check(np.abs(tm.P.T @ phi.phi - phi.phi).max(), 1e-10),
        "detailed_balance": _check(balance, BALANCE_TOL),
        "submultiplicativity": _check(submult, SUBMULT_TOL),
        "fast_vs_reference": _check(ref_err, FAST_REF_TOL),
    }


def level_metric(tm: TransitionMatrix, betas=(0.5, 0.75, 1.0)) -> dict:
    phi = stationary_distribution(tm)
    Q = hitting_fast(tm)
    out = {}
    for beta in betas:
        dist = hp_distance(hp_similarity(Q, phi, beta))
        rep = verify_metric_axioms(dist, tol=TRIANGLE_TOL)
        worst = rep["worst_violations"]
        checks = {
            "symmetry": _check(worst["symmetry"], SYMMETRY_TOL),
            "triangle": _check(worst["triangle"], TRIANGLE_TOL),
        }
        if beta > 0.5:
            checks["positivity"] = _check(
                worst["min_off_diagonal"], 0.0, ok=worst["min_off_diagonal"] > 0.0
            )
        out[f"beta={beta:g}"] = checks
    return out


def level_quotient(tm: TransitionMatrix, tol_deg: float = 1e-9) -> dict:
    phi = stationary_distribution(tm)
    Q = hitting_fast(tm)
    dist = hp_distance(hp_similarity(Q, phi, 0.5))
    report = degenerate_pairs(Q, phi, tol_deg)
    qc = quotient_from_report(tm, phi, report)
    phi_p = stationary_distribution(qc.chain)
    Q_p = hitting_fast(qc.chain)
    dist_p = hp_distance(hp_similarity(Q_p, phi_p, 0.5))

    phi_err = float(np.abs(phi_p.phi - qc.phi_prime).max())
    rep_p = degenerate_pairs(Q_p, phi_p, tol_deg)
    labelings = [segments(tm, order_class(tm, c)) for c in report.non_singleton()]
    bounds = check_quotient_bounds(dist, dist_p, qc, labelings, tol=QUOTIENT_TOL)
    return {
        "n_classes": len(report.classes),
        "degenerate": report.degenerate,
        "quotient_phi_consistency": _check(phi_err, 1e-10),
        "quotient_degeneracy_free": {"value": rep_p.degenerate, "ok": not rep_p.degenerate},
        "bounds": {
            "pairs_checked": bounds["pairs_checked"],
            "same_segment_pairs": bounds["same_segment_pairs"],
            "max_isometry_error": bounds["max_isometry_error"],
            "violations": len(bounds["violations"]),
            "ok": bounds["ok"],
        },
    }


def level_oracle(tm: TransitionMatrix, walks: int = 20000, seed: int = 0,
                 pairs: int = 6) -> dict:
    phi = stationary_distribution(tm)
    Q = hitting_fast(tm).Q
    n = tm.n
    rng = stream(seed, 2**32)
    all_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    if len(all_pairs) > pairs:
        idx = rng.choice(len(all_pairs), size=pairs, replace=False)
        tested = [all_pairs[k] for k in idx]
    else:
        tested = all_pairs
    hit_checks = []
    for t, (i, j) in enumerate(tested):
        q_hat, se = simulate_hit_before_return(tm, i, j, walks, seed + t)
        err = abs(q_hat - Q[i, j])
        hit_checks.append({
            "pair": [tm.labels[i], tm.labels[j]],
            "estimate": q_hat, "exact": float(Q[i, j]), "se": se,
            "ok": err <= 4.0 * se + MC_GUARD,
        })
    visit_checks = []
    for t, (i, j) in enumerate(tested[: max(1, pairs // 2)]):
        mean, se = simulate_visit_counts(tm, i, j, walks, seed + 1000 + t)
        target = float(phi.phi[j] / phi.phi[i])
        visit_checks.append({
            "pair": [tm.labels[i], tm.labels[j]],
            "mean": mean, "expected": target, "se": se,
            "ok": abs(mean - target) <= 4.0 * se + MC_GUARD,
        })
    frac = np.mean([c["ok"] for c in hit_checks + visit_checks])
    return {
        "walks": walks,
        "seed": seed,
        "hit_probability": hit_checks,
        "visit_counts": visit_checks,
        "pass_fraction": _check(1.0 - frac, 0.01),
    }


def _collect_ok(node) -> bool:
    if isinstance(node, dict):
        if "ok" in node and not isinstance(node["ok"], dict):
            if not node["ok"]:
                return False
        return all(_collect_ok(v) for v in node.values())
    if isinstance(node, list):
        return all(_collect_ok(v) for v in node)
    return True


def run_levels(tm: TransitionMatrix, levels, walks: int = 20000, seed: int = 0,
               betas=(0.5, 0.75, 1.0), tol_deg: float = 1e-9) -> dict:
    report = {"n": tm.n, "levels": {}}
    for level in levels:
        if level == "identity":
            report["levels"]["identity"] = level_identity(tm)
        elif level == "metric":
            report["levels"]["metric"] = level_metric(tm, betas)
        elif level == "quotient":
            report["levels"]["quotient"] = level_quotient(tm, tol_deg)
        elif level == "oracle":
            report["levels"]["oracle"] = level_oracle(tm, walks=walks, seed=seed)
        else:
            raise ValueError(f"unknown verification level {level!r}")
    report["ok"] = _collect_ok(report["levels"])
    return report
