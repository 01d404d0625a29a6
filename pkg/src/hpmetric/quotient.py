"""Structure theory of zero-distance classes and the quotient chain.

States at distance zero under the beta = 1/2 pseudo-metric form equivalence
classes that every commute must traverse in a fixed cyclic order.  Outside
nodes fall between consecutive class members (segments); collapsing classes
into single states yields a quotient chain whose distance is a true metric
and relates to the original by explicit bounds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import StructureError
from .graphs import TransitionMatrix
from .metric import DegeneracyReport
from .stationary import StationaryDistribution


@dataclass(frozen=True)
class OrderedClass:
    members: list  # commute order starting from the smallest member


@dataclass(frozen=True)
class SegmentLabeling:
    """For each node outside the class, the index k of the first class member
    every walk reaches, placing the node between members k-1 and k."""

    members: list
    labels: dict  # outside node -> k


@dataclass(frozen=True)
class QuotientChain:
    chain: TransitionMatrix
    classes: list  # member lists defining the quotient state order
    class_map: list  # original node -> quotient state
    phi_prime: np.ndarray


def _adjacency(P: np.ndarray) -> list:
    return [np.nonzero(P[i] > 0.0)[0].tolist() for i in range(P.shape[0])]


def _first_members_reached(adj, source: int, member_set: frozenset) -> set:
    """Class members reachable from `source` without passing through any
    class member on the way.  The source itself may be a member; reaching it
    again counts (a genuine class member never can)."""
    reached = set()
    seen = {source}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in member_set:
                reached.add(w)
            elif w not in seen:
                seen.add(w)
                queue.append(w)
    return reached


def order_class(tm: TransitionMatrix, members) -> OrderedClass:
    """Recover the cyclic commute order of an equivalence class.

    Starting from the smallest member, the successor of each member is the
    unique member reachable without passing through any other; the walk must
    visit every member once and close back on the start, otherwise the input
    was not a genuine class.
    """
    members = sorted(members)
    if len(members) <= 1:
        return OrderedClass(members=list(members))
    adj = _adjacency(tm.P)
    member_set = frozenset(members)
    order = [members[0]]
    current = members[0]
    for _ in range(len(members)):
        nxt = _first_members_reached(adj, current, member_set)
        if len(nxt) != 1:
            raise StructureError(
                f"member {tm.labels[current]!r} has {len(nxt)} successors in the "
                "class; the set is not a genuine equivalence class"
            )
        (succ,) = nxt
        if succ == members[0]:
            if len(order) != len(members):
                raise StructureError(
                    "commute order closed before visiting every member"
                )
            return OrderedClass(members=order)
        if succ in order:
            raise StructureError(
                f"member {tm.labels[succ]!r} revisited before the cycle closed"
            )
        order.append(succ)
        current = succ
    raise StructureError("commute order failed to close")


def segments(tm: TransitionMatrix, cls: OrderedClass) -> SegmentLabeling:
    """Assign each outside node the index of the first class member every
    walk from it must reach."""
    adj = _adjacency(tm.P)
    member_set = frozenset(cls.members)
    position = {m: k for k, m in enumerate(cls.members)}
    labels = {}
    for node in range(tm.n):
        if node in member_set:
            continue
        reached = _first_members_reached(adj, node, member_set)
        if len(reached) != 1:
            raise StructureError(
                f"node {tm.labels[node]!r} reaches {len(reached)} distinct class "
                "members first; segments are not well defined"
            )
        (m,) = reached
        labels[node] = position[m]
    return SegmentLabeling(members=list(cls.members), labels=labels)


def quotient_chain(tm: TransitionMatrix, phi: StationaryDistribution, partition) -> QuotientChain:
    """Collapse each class to one state with stationary-weighted transitions.

    P'[U, V] = (1/phi_U) * sum_{i in U} phi_i * sum_{j in V} P[i, j];
    phi'[U] = sum_{i in U} phi_i.
    """
    n = tm.n
    classes = sorted((sorted(c) for c in partition), key=lambda c: c[0])
    covered = [i for c in classes for i in c]
    if sorted(covered) != list(range(n)):
        raise StructureError("partition must cover every state exactly once")

    m = len(classes)
    class_map = [0] * n
    for u, cls in enumerate(classes):
        for i in cls:
            class_map[i] = u
    S = np.zeros((n, m))
    for i, u in enumerate(class_map):
        S[i, u] = 1.0

    p = phi.phi
    phi_prime = S.T @ p
    weighted = (p[:, None] * tm.P) @ S  # phi_i * P[i, V]
    P_prime = (S.T @ weighted) / phi_prime[:, None]
    labels = ["+".join(str(tm.labels[i]) for i in cls) for cls in classes]
    chain = TransitionMatrix(n=m, P=P_prime, labels=labels)
    return QuotientChain(chain=chain, classes=classes, class_map=class_map,
                         phi_prime=phi_prime)


def quotient_from_report(tm: TransitionMatrix, phi: StationaryDistribution,
                         report: DegeneracyReport) -> QuotientChain:
    """Quotient by the detected zero-distance classes, re-validating each
    non-singleton class structurally first."""
    for cls in report.non_singleton():
        order_class(tm, cls)
    return quotient_chain(tm, phi, report.classes)


def _segment_signature(node: int, labelings: list) -> tuple:
    sig = []
    for lab in labelings:
        if node in lab.labels:
            sig.append(("s", lab.labels[node]))
        else:
            sig.append(("m", lab.members.index(node)))
    return tuple(sig)


def absolute_segments(tm: TransitionMatrix, labelings: list) -> list:
    """Group nodes by their segment position with respect to every
    non-singleton class.  With no labelings, all nodes share one segment."""
    groups = {}
    for node in range(tm.n):
        groups.setdefault(_segment_signature(node, labelings), []).append(node)
    return sorted(groups.values(), key=lambda g: g[0])


def check_quotient_bounds(dist, dist_prime, quotient: QuotientChain,
                          labelings: list, tol: float = 1e-9) -> dict:
    """Verify the distance relations between a chain and its quotient.

    For i, j in distinct classes alpha, beta: if they share an absolute
    segment, distances agree within ``tol``; otherwise
    D[i, j] < D'[alpha, beta] <= D[i, j] + 0.5*log(|alpha||beta|) + c*log 2
    with c the number of other classes whose segments separate i and j.
    """
    D = dist.D
    Dp = dist_prime.D
    class_map = quotient.class_map
    sizes = [len(c) for c in quotient.classes]
    n = D.shape[0]

    sigs = [_segment_signature(i, labelings) for i in range(n)]
    # Per-labeling class index, to exclude alpha and beta from the count c.
    member_sets = [frozenset(lab.members) for lab in labelings]

    violations = []
    max_isometry_err = 0.0
    pairs = same_segment = 0
    log2 = np.log(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = class_map[i], class_map[j]
            if a == b:
                continue
            pairs += 1
            d = D[i, j]
            dp = Dp[a, b]
            if sigs[i] == sigs[j]:
                same_segment += 1
                err = abs(d - dp)
                max_isometry_err = max(max_isometry_err, err)
                if err > tol:
                    violations.append((i, j, "isometry", err))
                continue
            c = 0
            for lab, mset in zip(labelings, member_sets):
                if i in mset or j in mset:
                    continue
                if lab.labels[i] != lab.labels[j]:
                    c += 1
            upper = d + 0.5 * np.log(sizes[a] * sizes[b]) + c * log2
            if not dp > d:
                violations.append((i, j, "lower", dp - d))
            if dp > upper + tol:
                violations.append((i, j, "upper", dp - upper))

    return {
        "ok": not violations,
        "pairs_checked": pairs,
        "same_segment_pairs": same_segment,
        "max_isometry_error": max_isometry_err,
        "violations": violations,
    }
