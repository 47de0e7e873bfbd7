"""The k-median cost and the truncated second-closest-facility potential.

Per client the potential is d1 + beta*min(d2, alpha*d1): the usual service
cost plus a discounted, truncated backup term.  Solutions cache the q+1
nearest open facilities per client so single-facility closures are repaired
by merging; larger closures rescan only the affected clients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import nearest_facilities

INF = float("inf")


@dataclass(frozen=True)
class PotentialParams:
    """Truncation multipliers and weights; defaults are alpha=3, beta=1/5.

    ``q`` of 3 adds a third-closest term with (alpha3, beta3); alpha3
    defaults to alpha2 because no canonical value exists for it.
    """
    q: int = 2
    alpha: float = 3.0
    beta: float = 0.2
    alpha3: float | None = None
    beta3: float | None = None

    def __post_init__(self):
        if self.q not in (2, 3):
            raise ValueError("q must be 2 or 3")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if not (0 <= self.beta <= 1):
            raise ValueError("beta must be in [0, 1]")
        if self.q == 3:
            object.__setattr__(self, "alpha3", self.alpha if self.alpha3 is None else self.alpha3)
            object.__setattr__(self, "beta3", 0.3 * 0.34 if self.beta3 is None else self.beta3)

    @staticmethod
    def phi3_paper():
        # the experimentally tuned third-order setting: alpha=2.5, beta=0.3, beta3=0.3*0.34
        return PotentialParams(q=3, alpha=2.5, beta=0.3, alpha3=2.5, beta3=0.3 * 0.34)


def client_potential(d1, d2, params, d3=None):
    """Potential contribution of one client given its nearest-distance profile."""
    if d1 < 0 or d2 < d1 - 1e-12:
        raise ValueError(f"need 0 <= d1 <= d2, got d1={d1}, d2={d2}")
    val = d1 + params.beta * min(d2, params.alpha * d1)
    if params.q == 3:
        if d3 is None:
            d3 = INF
        val += params.beta3 * min(d3, params.alpha3 * d1)
    return val


class Solution:
    """An open facility set with per-client nearest-open caches.

    ``open_set`` holds positions into ``instance.facilities`` (not raw point
    indices).  The cache keeps the q+1 nearest open facilities per client;
    with q=2 that is enough to repair any single closure exactly.
    """

    CACHE_DEPTH = 3

    def __init__(self, instance, open_facilities, params=None):
        self.instance = instance
        self.params = params or PotentialParams()
        self.open_set = tuple(sorted(int(f) for f in open_facilities))
        if len(set(self.open_set)) != len(self.open_set):
            raise ValueError("duplicate facilities in solution")
        if not self.open_set:
            raise ValueError("solution must open at least one facility")
        nf = instance.n_facilities
        if any(not (0 <= f < nf) for f in self.open_set):
            raise ValueError("facility position out of range")
        self._rebuild_cache()

    def _rebuild_cache(self):
        block = self.instance.client_facility_distances()
        open_arr = np.fromiter(self.open_set, dtype=np.intp)
        d = block[:, open_arr]
        depth = min(self.CACHE_DEPTH, len(open_arr))
        # lexsort on (facility position, distance): deterministic tie-break
        order = np.lexsort((np.broadcast_to(open_arr, d.shape), d), axis=1)[:, :depth]
        rows = np.arange(d.shape[0])[:, None]
        self._cache_f = open_arr[order]              # (n_clients, depth) facility positions
        self._cache_d = np.take_along_axis(d, order, axis=1)[:, :depth]

    @property
    def k(self):
        return len(self.open_set)

    def nearest(self, client, rank=1):
        """rank-th nearest open facility and distance (1-based rank)."""
        if rank <= self._cache_f.shape[1]:
            return int(self._cache_f[client, rank - 1]), float(self._cache_d[client, rank - 1])
        got = nearest_facilities(self.instance, client, list(self.open_set), rank)
        return got[rank - 1]

    def profile(self, client):
        """(d1, d2, d3) with INF padding when fewer facilities are open."""
        ds = list(self._cache_d[client])
        while len(ds) < 3:
            ds.append(INF)
        return float(ds[0]), float(ds[1]), float(ds[2])

    def with_swap(self, close, open_):
        new = set(self.open_set)
        new.difference_update(close)
        new.update(open_)
        return Solution(self.instance, new, self.params)


def kmed_cost(instance, solution):
    """Eq-style service cost: sum over clients of the nearest open distance."""
    return float(math.fsum(solution._cache_d[:, 0]))


def potential(instance, solution, params=None):
    params = params or solution.params
    total = []
    for c in range(instance.n_clients):
        d1, d2, d3 = solution.profile(c)
        total.append(client_potential(d1, d2, params, d3))
    return float(math.fsum(total))


def _client_phi_from_sorted(dists, params):
    d1 = dists[0]
    d2 = dists[1] if len(dists) > 1 else INF
    d3 = dists[2] if len(dists) > 2 else INF
    return client_potential(d1, d2, params, d3)


def delta(instance, solution, swap, params=None, return_per_client=False):
    """Potential change of applying ``swap = (P, Q)`` to ``solution``.

    P and Q are facility positions; P must be open.  Q may intersect the
    open set or be smaller than P (the extended swap notion).  Incremental:
    only clients whose cached neighborhoods touch P or improve via Q are
    re-evaluated, and the result matches a from-scratch recomputation.
    """
    params = params or solution.params
    close = set(int(f) for f in swap[0])
    open_ = set(int(f) for f in swap[1])
    if not close.issubset(solution.open_set):
        raise ValueError("swap closes facilities that are not open")
    open_eff = open_ - (set(solution.open_set) - close)
    survivors = set(solution.open_set) - close | open_eff
    if not survivors:
        raise ValueError("swap would close every facility")

    block = instance.client_facility_distances()
    open_new = np.fromiter(sorted(survivors), dtype=np.intp)
    per_client = {}
    depth = solution._cache_f.shape[1]

    cache_f = solution._cache_f
    cache_d = solution._cache_d
    closed_mask = np.isin(cache_f, list(close)) if close else np.zeros_like(cache_f, dtype=bool)
    n_closed_in_cache = closed_mask.sum(axis=1)

    if open_eff:
        q_arr = np.fromiter(sorted(open_eff), dtype=np.intp)
        dq = block[:, q_arr]
    else:
        q_arr = None

    total = []
    for c in range(instance.n_clients):
        old_phi = _client_phi_from_sorted(list(cache_d[c]) + [INF, INF], params)
        need = params.q  # how many survivors we must know exactly
        kept = [(cache_d[c, i], cache_f[c, i]) for i in range(depth) if not closed_mask[c, i]]
        candidates = list(kept)
        if q_arr is not None:
            candidates += [(dq[c, i], int(q_arr[i])) for i in range(len(q_arr))]
        if len(kept) >= need or len(kept) == len(survivors) - len(open_eff):
            # enough cached survivors to certify the new top-q exactly
            candidates.sort()
            dists = [d for d, _ in candidates[:need + 1]]
        else:
            # cache cannot certify the new top-q: rescan this client
            d_all = block[c, open_new]
            d_all.sort()
            dists = list(d_all[:need + 1])
        new_phi = _client_phi_from_sorted(dists + [INF, INF], params)
        change = new_phi - old_phi
        if change != 0.0:
            per_client[c] = change
        total.append(change)

    tot = float(math.fsum(total))
    if return_per_client:
        return per_client, tot
    return tot


def cost_delta(instance, solution, swap):
    """Change in plain k-median cost under the swap (same incremental rules)."""
    close = set(int(f) for f in swap[0])
    open_ = set(int(f) for f in swap[1])
    survivors = set(solution.open_set) - close | (open_ - (set(solution.open_set) - close))
    if not survivors:
        raise ValueError("swap would close every facility")
    block = instance.client_facility_distances()
    open_new = np.fromiter(sorted(survivors), dtype=np.intp)
    cache_f = solution._cache_f
    cache_d = solution._cache_d
    total = []
    q_list = sorted(open_ - set(solution.open_set) | (open_ & close))
    for c in range(instance.n_clients):
        old = cache_d[c, 0]
        alive = [cache_d[c, i] for i in range(cache_f.shape[1]) if cache_f[c, i] not in close]
        best_q = min((block[c, f] for f in q_list), default=INF)
        if alive:
            new = min(alive[0], best_q)
        elif best_q < INF:
            # all cached closed; the true nearest may be an uncached survivor
            new = min(best_q, float(block[c, open_new].min()))
        else:
            new = float(block[c, open_new].min())
        total.append(new - old)
    return float(math.fsum(total))
