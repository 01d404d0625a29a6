"""Normalized hitting-probability similarity and the -log distance.

The similarity A[i, j] = phi_i^beta / phi_j^(1-beta) * Q[i, j] is symmetric
by the detailed-balance identity Q[i, j] phi_i = Q[j, i] phi_j; the distance
D = -log A is a metric for beta in (1/2, 1] and a pseudo-metric at
beta = 1/2, where pairs with Q[i, j] = Q[j, i] = 1 collapse to distance 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError, ToleranceError
from .hitting import HittingProbabilities
from .stationary import StationaryDistribution
from .rng import stream

TOL_DEG = 1e-9

SYMMETRY_CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class HpSimilarity:
    beta: float
    A: np.ndarray
    asymmetry: float  # max |A - A^T| before explicit symmetrization

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class HpDistance:
    beta: float
    D: np.ndarray
    is_pseudo: bool

    @property
    def n(self) -> int:
        return self.D.shape[0]


@dataclass(frozen=True)
class DegeneracyReport:
    classes: list  # partition of range(n), ordered by smallest member
    degenerate: bool

    def non_singleton(self) -> list:
        return [c for c in self.classes if len(c) > 1]


def _q_matrix(Q) -> np.ndarray:
    if isinstance(Q, HittingProbabilities):
        return Q.Q
    return np.asarray(Q, dtype=float)


def hp_similarity(Q, phi: StationaryDistribution, beta: float) -> HpSimilarity:
    """Build the similarity matrix at the given beta >= 1/2.

    The result is explicitly symmetrized as (A + A^T)/2; the asymmetry before
    symmetrization is recorded and must be tiny, otherwise Q and phi do not
    come from the same chain.
    """
    if beta < 0.5:
        raise InputError(f"beta must be >= 0.5, got {beta}")
    Qm = _q_matrix(Q)
    p = phi.phi
    A = (p**beta)[:, None] * (p ** (beta - 1.0))[None, :] * Qm
    np.fill_diagonal(A, 1.0)
    asym = float(np.abs(A - A.T).max())
    if asym > SYMMETRY_CONSISTENCY_TOL:
        raise NumericalError(
            f"similarity asymmetry {asym:.3e} exceeds {SYMMETRY_CONSISTENCY_TOL:.0e}; "
            "Q and phi are inconsistent"
        )
    A = (A + A.T) / 2.0
    if beta == 0.5 and A.max() > 1.0 + 1e-12:
        raise NumericalError(
            f"similarity at beta=1/2 exceeds 1 by {A.max() - 1.0:.3e}"
        )
    return HpSimilarity(beta=beta, A=A, asymmetry=asym)


def hp_distance(sim: HpSimilarity, tol_deg: float = TOL_DEG) -> HpDistance:
    """D = -log A.  Entries equal to 1 map to exactly 0.

    ``is_pseudo`` is set iff beta = 1/2 and some off-diagonal distance is
    below ``tol_deg``.
    """
    A = sim.A
    if A.min() <= 0.0:
        raise InputError("similarity entries must be positive")
    D = -np.log(A) + 0.0  # fold -0.0 into +0.0
    np.fill_diagonal(D, 0.0)
    off = ~np.eye(A.shape[0], dtype=bool)
    is_pseudo = bool(sim.beta == 0.5 and A.shape[0] > 1 and (D[off] < tol_deg).any())
    return HpDistance(beta=sim.beta, D=D, is_pseudo=is_pseudo)


def verify_metric_axioms(dist: HpDistance, tol: float = 1e-9, seed: int = 0,
                         exhaustive_limit: int = 500, samples: int = 10**6) -> dict:
    """Check symmetry, triangle inequality, and off-diagonal positivity.

    All pairs/triples are checked exhaustively for n <= ``exhaustive_limit``;
    above that, ``samples`` random triples are drawn.  Returns a report with
    per-axiom booleans (at tolerance ``tol``) and the worst observed slack,
    so callers can apply stricter thresholds.
    """
    D = dist.D
    n = D.shape[0]
    worst_sym = float(np.abs(D - D.T).max())
    off = ~np.eye(n, dtype=bool)
    min_off = float(D[off].min()) if n > 1 else np.inf

    worst_tri = -np.inf
    if n <= exhaustive_limit:
        for k in range(n):
            viol = D - (D[:, k][:, None] + D[k, :][None, :])
            worst_tri = max(worst_tri, float(viol.max()))
    else:
        rng = stream(seed, 0)
        idx = rng.integers(0, n, size=(samples, 3))
        i, k, j = idx[:, 0], idx[:, 1], idx[:, 2]
        viol = D[i, j] - D[i, k] - D[k, j]
        worst_tri = float(viol.max())

    return {
        "symmetry_ok": worst_sym <= tol,
        "triangle_ok": worst_tri <= tol,
        "positivity_ok": bool(min_off > 0.0),
        "worst_violations": {
            "symmetry": worst_sym,
            "triangle": worst_tri,
            "min_off_diagonal": min_off,
        },
    }


def degenerate_pairs(Q, phi: StationaryDistribution, tol_deg: float = TOL_DEG) -> DegeneracyReport:
    """Group states into equivalence classes of the zero-distance relation.

    States i, j are related when Q[i, j] and Q[j, i] are both within
    ``tol_deg`` of 1; classes are the transitive closure.  The closure is
    re-validated: every within-class pair must satisfy the pair condition
    within 10 * tol_deg, and the stationary mass must be constant within a
    class, otherwise the grouping is a tolerance artifact.
    """
    Qm = _q_matrix(Q)
    n = Qm.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    both = np.minimum(Qm, Qm.T)
    linked = np.argwhere(both >= 1.0 - tol_deg)
    for i, j in linked:
        if i < j:
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    classes = sorted((sorted(g) for g in groups.values()), key=lambda c: c[0])

    p = phi.phi
    for cls in classes:
        if len(cls) == 1:
            continue
        sub = both[np.ix_(cls, cls)].copy()
        np.fill_diagonal(sub, 1.0)
        if sub.min() < 1.0 - 10.0 * tol_deg:
            raise ToleranceError(
                "transitive closure is inconsistent at this tolerance; "
                "retry with a smaller tol_deg"
            )
        spread = float(p[cls].max() - p[cls].min())
        if spread > 1e-8 * float(p[cls].max()):
            raise ToleranceError(
                f"stationary mass varies by {spread:.3e} inside a degenerate "
                "class; retry with a smaller tol_deg"
            )

    degenerate = any(len(c) > 1 for c in classes)
    return DegeneracyReport(classes=classes, degenerate=degenerate)
