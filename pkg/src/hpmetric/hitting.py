"""Hitting probabilities Q[i, j] = P_i(walk reaches j before returning to i).

Two exact paths are provided: a per-column reference solve, and a fast path
that inverts a single matrix and recovers every other column through a rank-2
Sherman-Morrison-Woodbury update in O(n) per column.  Monte Carlo walk
simulation serves as an independent statistical oracle.
"""

from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import NumericalError, SimulationDivergenceError
from .graphs import TransitionMatrix
from .rng import stream

STEP_CAP = 10_000_000

# 1-norm condition estimate above which the single-inverse path is abandoned
# for per-column solves.
COND_LIMIT = 1e12


@dataclass(frozen=True)
class HittingProbabilities:
    """Matrix of hit-before-return probabilities with zero diagonal.

    ``smw_fallbacks`` counts columns where the 2x2 capacitance was too close
    to singular and the column was recomputed by the reference solve;
    ``used_reference`` is True when conditioning forced every column onto the
    reference path.
    """

    Q: np.ndarray
    smw_fallbacks: int = 0
    used_reference: bool = False

    @property
    def n(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class WalkRecord:
    start: int
    hit_before_return: bool
    visits_to_target: int

    def __post_init__(self):
        if self.visits_to_target >= 1 and not self.hit_before_return:
            raise ValueError("a visited target must have been hit")


def _column_matrix(P: np.ndarray, j: int) -> np.ndarray:
    # I - P with row j overwritten by e_j (equivalently I - P + e_j e_j^T P).
    M = np.eye(P.shape[0]) - P
    M[j, :] = 0.0
    M[j, j] = 1.0
    return M


def hitting_reference(tm: TransitionMatrix, j: int) -> np.ndarray:
    """Column j of Q by an independent dense factorization.

    Q[i, j] = inv(M)[i, j] / inv(M)[i, i] with M = I - P + e_j e_j^T P.
    """
    n = tm.n
    if not 0 <= j < n:
        raise IndexError(f"state {j} out of range for n={n}")
    M = _column_matrix(tm.P, j)
    try:
        inv = la.inv(M)
    except la.LinAlgError as exc:
        raise NumericalError(f"column matrix for state {j} is singular: {exc}") from exc
    col = inv[:, j] / np.diag(inv)
    col[j] = 0.0
    return col


def _fast_columns(P: np.ndarray, B: np.ndarray):
    """Yield (j, column) for j >= 1 via rank-2 SMW updates of B = inv(M(0)).

    M(j) = M(0) + U V^T with U = [e_j, -e_0] and V^T = [e_j^T P; e_0^T P].
    Only 2n - 2 entries of B are touched per column: B[:, j], B[:, 0] and
    B[j, :], via the identity e_j^T P B = e_j^T B - e_j^T (valid for j != 0).
    """
    n = P.shape[0]
    diagB = np.diag(B).copy()
    col0 = B[:, 0].copy()
    r1 = P[0, :] @ B

    for j in range(1, n):
        colj = B[:, j]
        v1 = B[j, :].copy()
        v1[j] -= 1.0
        c11 = B[j, j]
        c12 = -B[j, 0]
        c21 = r1[j]
        c22 = 1.0 - r1[0]
        det = c11 * c22 - c12 * c21
        scale = abs(c11 * c22) + abs(c12 * c21)
        if abs(det) <= 1e-14 * max(1.0, scale):
            yield j, None
            continue
        # Column j of inv(M(j)).
        w0 = (c22 * v1[j] - c12 * r1[j]) / det
        w1 = (-c21 * v1[j] + c11 * r1[j]) / det
        numer = colj - (colj * w0 - col0 * w1)
        # Diagonal of inv(M(j)).
        z0 = (c22 * v1 - c12 * r1) / det
        z1 = (-c21 * v1 + c11 * r1) / det
        denom = diagB - (colj * z0 - col0 * z1)
        q = numer / denom
        q[j] = 0.0
        yield j, q


def hitting_fast(tm: TransitionMatrix) -> HittingProbabilities:
    """Full Q in O(n^3): one dense inverse, then O(n) per column.

    Falls back to per-column reference solves when the base matrix is too
    ill-conditioned, or per column when an update denominator degenerates.
    """
    n = tm.n
    P = tm.P
    M0 = _column_matrix(P, 0)
    try:
        B = la.inv(M0)
    except la.LinAlgError as exc:
        raise NumericalError(f"base column matrix is singular: {exc}") from exc

    cond_est = la.norm(M0, 1) * la.norm(B, 1)
    if cond_est > COND_LIMIT:
        Q = np.empty((n, n))
        for j in range(n):
            Q[:, j] = hitting_reference(tm, j)
        return HittingProbabilities(Q=Q, used_reference=True)

    Q = np.empty((n, n))
    Q[:, 0] = B[:, 0] / np.diag(B)
    Q[0, 0] = 0.0
    fallbacks = 0
    for j, col in _fast_columns(P, B):
        if col is None:
            fallbacks += 1
            col = hitting_reference(tm, j)
        Q[:, j] = col
    if fallbacks:
        warnings.warn(
            f"{fallbacks} column(s) fell back to the reference solve",
            RuntimeWarning,
            stacklevel=2,
        )
    return HittingProbabilities(Q=Q, smw_fallbacks=fallbacks)


def _cumulative_rows(P: np.ndarray) -> list:
    rows = []
    for i in range(P.shape[0]):
        c = np.cumsum(P[i]).tolist()
        c[-1] = 1.0
        rows.append(c)
    return rows


def run_walk(cum_rows, i: int, j: int, rng, stop_at_target: bool) -> WalkRecord:
    """One excursion from i: stops at the first return to i, or earlier at the
    first arrival at j when ``stop_at_target``."""
    state = i
    visits = 0
    rand = rng.random
    for _ in range(STEP_CAP):
        state = bisect_right(cum_rows[state], rand())
        if state == j:
            visits += 1
            if stop_at_target:
                return WalkRecord(start=i, hit_before_return=True, visits_to_target=visits)
        elif state == i:
            return WalkRecord(
                start=i, hit_before_return=visits >= 1, visits_to_target=visits
            )
    raise SimulationDivergenceError(
        f"walk from {i} exceeded {STEP_CAP} steps without returning"
    )


def simulate_hit_before_return(tm: TransitionMatrix, i: int, j: int, walks: int, seed: int):
    """Monte Carlo estimate of Q[i, j] with its binomial standard error.

    Each walk runs on its own counter-based stream keyed by (seed, walk
    index), so results are reproducible under any execution order.
    """
    if i == j:
        raise ValueError("source and target must differ")
    if walks < 1:
        raise ValueError("need at least one walk")
    cum_rows = _cumulative_rows(tm.P)
    hits = 0
    for w in range(walks):
        rec = run_walk(cum_rows, i, j, stream(seed, w), stop_at_target=True)
        hits += rec.hit_before_return
    q = hits / walks
    se = float(np.sqrt(q * (1.0 - q) / walks))
    return q, se


def simulate_visit_counts(tm: TransitionMatrix, i: int, j: int, walks: int, seed: int):
    """Mean number of visits to j per excursion from i, with standard error.

    The expectation equals phi[j] / phi[i], giving an independent check of
    the stationary distribution.
    """
    if i == j:
        raise ValueError("source and target must differ")
    if walks < 1:
        raise ValueError("need at least one walk")
    cum_rows = _cumulative_rows(tm.P)
    counts = np.empty(walks)
    for w in range(walks):
        rec = run_walk(cum_rows, i, j, stream(seed, w), stop_at_target=False)
        counts[w] = rec.visits_to_target
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / np.sqrt(walks)) if walks > 1 else 0.0
    return mean, se
