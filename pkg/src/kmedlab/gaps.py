"""Locality-gap instance families and random test instances.

The two adversarial families place one client between every (optimal,
local) facility pair: unit distance to the optimal side and distance d to
the local side.  All remaining distances are the shortest-path closure of
that gadget graph.  The closed-form ratio targets come from evaluating
min{max{3-2b, 1+4b}, max{2, a}} and picking the sub-case that realizes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import MetricInstance, floyd_warshall
from .potential import PotentialParams, Solution
from .search import verify_local_optimality

INF = float("inf")


@dataclass
class GapInstance:
    instance: MetricInstance
    local_positions: list   # positions into instance.facilities
    optimal_positions: list
    family: str
    k: int
    r: int
    d: float


def biclique(k, r, d):
    """k optimal facilities, k+r local, one client per pair at distances (1, d)."""
    if k < 2 or r < 0 or d <= 0:
        raise ValueError("need k >= 2, r >= 0, d > 0")
    n_opt, n_loc = k, k + r
    n_clients = n_opt * n_loc
    n = n_clients + n_opt + n_loc
    w = np.full((n, n), INF)
    np.fill_diagonal(w, 0.0)
    labels = []
    client_of = {}
    cid = 0
    for i in range(n_opt):
        for j in range(n_loc):
            client_of[(i, j)] = cid
            labels.append(f"c:{i},{j}")
            cid += 1
    opt_base, loc_base = n_clients, n_clients + n_opt
    labels += [f"opt:{i}" for i in range(n_opt)] + [f"loc:{j}" for j in range(n_loc)]
    for (i, j), c in client_of.items():
        w[c, opt_base + i] = w[opt_base + i, c] = 1.0
        w[c, loc_base + j] = w[loc_base + j, c] = d
    m = floyd_warshall(w)
    inst = MetricInstance(n, np.arange(n_clients), np.arange(n_clients, n),
                          matrix=m, labels=labels, source="shortest-path-graph")
    # facility positions are relative to instance.facilities (opts first)
    return GapInstance(inst, list(range(n_opt, n_opt + n_loc)), list(range(n_opt)),
                       "biclique", k, r, float(d))


def double_biclique(k, r, d):
    """Two back-to-back bi-cliques with halved counts and cross edges.

    Every client ends up with one optimal facility at distance 1 and two
    local facilities at distance d (own side plus the position-aligned
    local on the other side).  Needs k and r even so the halves match.
    """
    if k < 4 or k % 2:
        raise ValueError("need even k >= 4")
    if r < 0 or r % 2:
        raise ValueError("need even r >= 0 (halves must align)")
    if d <= 0:
        raise ValueError("need d > 0")
    ko, lo = k // 2, (k + r) // 2   # per-clique optimal / local counts
    n_clients = 2 * ko * lo
    n = n_clients + 2 * ko + 2 * lo
    w = np.full((n, n), INF)
    np.fill_diagonal(w, 0.0)
    labels = []
    cid = 0
    client_of = {}
    for side in (0, 1):
        for i in range(ko):
            for j in range(lo):
                client_of[(side, i, j)] = cid
                labels.append(f"c{side}:{i},{j}")
                cid += 1
    opt_base = n_clients
    loc_base = n_clients + 2 * ko
    labels += [f"opt{s}:{i}" for s in (0, 1) for i in range(ko)]
    labels += [f"loc{s}:{j}" for s in (0, 1) for j in range(lo)]
    for (side, i, j), c in client_of.items():
        w[c, opt_base + side * ko + i] = w[opt_base + side * ko + i, c] = 1.0
        w[c, loc_base + side * lo + j] = w[loc_base + side * lo + j, c] = d
        other = 1 - side
        w[c, loc_base + other * lo + j] = w[loc_base + other * lo + j, c] = d
    m = floyd_warshall(w)
    inst = MetricInstance(n, np.arange(n_clients), np.arange(n_clients, n),
                          matrix=m, labels=labels, source="shortest-path-graph")
    return GapInstance(inst, list(range(2 * ko, 2 * ko + 2 * lo)), list(range(2 * ko)),
                       "double-biclique", k, r, float(d))


def random_euclidean(n_clients, n_facilities, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n_clients + n_facilities, dim))
    return MetricInstance(n_clients + n_facilities,
                          np.arange(n_clients),
                          np.arange(n_clients, n_clients + n_facilities),
                          coords=pts, source="euclidean-points")


# -- Theorem-level predictions ------------------------------------------------

@dataclass
class GapPrediction:
    ratio: float          # closed-form asymptotic locality gap
    family: str           # which construction realizes it
    case: str             # sub-case label
    case_distance: float  # the d the construction aims for (before the finite-size margin)


def predicted_gap(alpha, beta):
    """Closed-form locality gap min{max{3-2b, 1+4b}, max{2, a}} with its sub-case.

    The sub-case label records which family and which d realize the bound.
    """
    if alpha < 1 or not (0 <= beta <= 1):
        raise ValueError("need alpha >= 1 and 0 <= beta <= 1")
    left = max(3 - 2 * beta, 1 + 4 * beta)
    right = max(2.0, alpha)
    ratio = min(left, right)
    if alpha <= 2:
        if alpha <= 4 / 3 + (1 / (3 * beta) if beta > 0 else INF):
            return GapPrediction(2.0, "biclique", "alpha<=2, alpha<=4/3+1/(3beta)", 2.0)
        return GapPrediction(2.0, "double-biclique", "alpha<=2, alpha>4/3+1/(3beta)", 2.0)
    if beta <= 0.5:
        if 3 - 2 * beta <= alpha:
            return GapPrediction(3 - 2 * beta, "biclique", "beta<=1/2, alpha>2, 3-2beta<=alpha", 3 - 2 * beta)
        return GapPrediction(alpha, "biclique", "beta<=1/2, 2<alpha<3-2beta", alpha)
    if 1 + 4 * beta <= alpha:
        return GapPrediction(1 + 4 * beta, "double-biclique", "beta>1/2, alpha>=1+4beta", 1 + 4 * beta)
    return GapPrediction(min(ratio, alpha), "double-biclique", "beta>1/2, 2<alpha<1+4beta", min(ratio, alpha))


def sufficient_epsilon(case, k, r, p, alpha, beta):
    """The construction's published finite-size margin for each sub-case.

    These are the explicit 'holds for any eps >= ...' expressions; they are
    sufficient, often loose at desk scale.
    """
    ab = alpha * beta
    if case.startswith("alpha<=2, alpha<=4/3"):
        return (p * p * (2 + 4 * beta - 2 * ab) + r * p * (1 + ab)) / (p * k)
    if case.startswith("beta<=1/2, alpha>2, 3-2beta<=alpha"):
        return (2 * p * r + 2 * p * p) / (p * (k + r))
    if case.startswith("beta<=1/2, 2<alpha"):
        return (p * r * (alpha - 1 - 2 * beta) + 2 * p * p) / (p * k)
    if case.startswith("beta>1/2, alpha>=1+4beta"):
        return (4 * beta * r + 8 * beta * p) / (k + r)
    if case.startswith("beta>1/2, 2<alpha"):
        return (p * r * (alpha - 1) + 8 * p * p * beta) / (p * k)
    if case.startswith("alpha<=2, alpha>4/3"):
        # that sub-case fixes d = 2 and needs k large; treat the margin as 0
        return 0.0
    raise ValueError(f"unknown case {case!r}")


def build_gap(family, k, r, d):
    if family in ("biclique", "bi-clique"):
        return biclique(k, r, d)
    if family in ("double-biclique", "double"):
        rr = r if r % 2 == 0 else r + 1  # halves must align; round odd r up
        return double_biclique(k, rr, d)
    raise ValueError(f"unknown family {family!r}")


def certified_distance(family, k, r, p, alpha, beta, hi=None, tol=1e-4):
    """Largest d (within tol) for which the local side is a certified local
    optimum of the potential against all swaps of size <= p.

    Bisection over d with exhaustive certification at each probe; this is
    the exact finite-size analogue of the published sufficient margins,
    which can be far from tight at small k.
    """
    params = PotentialParams(alpha=alpha, beta=beta)
    pred = predicted_gap(alpha, beta)
    if hi is None:
        hi = max(pred.case_distance, alpha) + 0.5
    lo = 1.0

    def certified(d):
        gap = build_gap(family, k, r, d)
        sol = Solution(gap.instance, gap.local_positions, params)
        rep = verify_local_optimality(gap.instance, sol, p, "potential", params,
                                      tolerance=1e-9)
        return rep.certified

    if not certified(lo + tol):
        return None
    if certified(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            lo = mid
        else:
            hi = mid
    return lo


def auto_distance(family, case, k, r, p, alpha, beta, mode="certified"):
    """Resolve `--d auto`: the sub-case distance minus a margin.

    'published' uses the sufficient-epsilon expressions; 'certified'
    (default) refines to the exact enumeration threshold at this (k, r, p),
    never returning less than the published value.
    """
    pred = predicted_gap(alpha, beta)
    published = max(pred.case_distance - sufficient_epsilon(case, k, r, p, alpha, beta), 1.0 + 1e-6)
    if mode == "published":
        return published
    exact = certified_distance(family, k, r, p, alpha, beta)
    if exact is None:
        return published
    exact = min(exact - 1e-6, pred.case_distance)
    return max(published, exact)
