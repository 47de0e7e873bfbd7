"""p-swap local search over the potential (or the plain cost) plus oracles.

The search accepts any valid swap that improves the objective by the
polynomial threshold factor; enumeration order is shuffled each iteration
under the run seed, so traces are reproducible end to end.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .potential import PotentialParams, Solution, kmed_cost, potential, delta, cost_delta

BRUTE_FORCE_GUARD = 10_000_000


@dataclass
class SearchConfig:
    k: int
    p: int = 1
    objective: str = "potential"  # "potential" | "cost"
    params: PotentialParams = field(default_factory=PotentialParams)
    delta_threshold: float = 1e-4  # the delta in delta' = delta * n^(-p)
    pivot: str = "first"           # "first" | "best"
    seed: int = 0
    max_iterations: int = 10_000
    prune_candidates: bool = False  # documented deviation; never used in acceptance runs

    def __post_init__(self):
        if self.k < 1 or self.p < 1:
            raise ValueError("k and p must be positive")
        if not (0 <= self.delta_threshold < 1):
            raise ValueError("delta_threshold must be in [0, 1)")
        if self.objective not in ("potential", "cost"):
            raise ValueError("objective must be 'potential' or 'cost'")
        if self.pivot not in ("first", "best"):
            raise ValueError("pivot must be 'first' or 'best'")


@dataclass
class TraceStep:
    iteration: int
    closed: tuple
    opened: tuple
    phi_before: float
    phi_after: float
    cost_before: float
    cost_after: float
    seconds: float


@dataclass
class RunTrace:
    steps: list = field(default_factory=list)
    termination: str = ""
    iterations: int = 0
    seconds: float = 0.0


def greedy_seed(instance, k):
    """Deterministic initial solution: best 1-median, then farthest-point additions."""
    block = instance.client_facility_distances()
    nf = instance.n_facilities
    if k > nf:
        raise ValueError(f"k={k} exceeds {nf} facilities")
    first = int(np.argmin(block.sum(axis=0)))
    chosen = [first]
    ff = instance.facility_facility_distances()
    mind = ff[:, first].copy()
    while len(chosen) < k:
        mind[chosen] = -1.0
        nxt = int(np.argmax(mind))  # argmax returns the lowest index on ties
        chosen.append(nxt)
        np.minimum(mind, ff[:, nxt], out=mind)
    return sorted(chosen)


def enumerate_swaps(open_set, n_facilities, p, rng=None, candidate_filter=None):
    """Yield every valid (P, Q) with |P| = |Q| <= p exactly once.

    Deterministic order: by swap size, then lexicographic; when ``rng`` is
    given the order within each size class is shuffled reproducibly.
    """
    open_list = sorted(open_set)
    outside = [f for f in range(n_facilities) if f not in set(open_list)]
    if candidate_filter is not None:
        outside = [f for f in outside if candidate_filter(f)]
    for s in range(1, p + 1):
        ps = list(itertools.combinations(open_list, s))
        qs = list(itertools.combinations(outside, s))
        pairs = [(pp, qq) for pp in ps for qq in qs]
        if rng is not None:
            rng.shuffle(pairs)
        yield from pairs


def swap_count(n_open, n_out, p):
    return sum(math.comb(n_open, s) * math.comb(n_out, s) for s in range(1, p + 1))


def run(instance, config, initial=None):
    """Local search to a (thresholded) local optimum; returns (Solution, RunTrace)."""
    t0 = time.perf_counter()
    nf = instance.n_facilities
    if config.k > nf:
        raise ValueError(f"k={config.k} exceeds {nf} facilities")
    open0 = initial if initial is not None else greedy_seed(instance, config.k)
    if len(set(open0)) != config.k:
        raise ValueError("initial solution size != k")
    sol = Solution(instance, open0, config.params)
    rng = np.random.default_rng(config.seed)
    n = instance.n_points
    rel = config.delta_threshold * n ** (-config.p)

    trace = RunTrace()
    objective_value = _objective(instance, sol, config)
    while trace.iterations < config.max_iterations:
        trace.iterations += 1
        improving = None
        best_gain = 0.0
        threshold = -rel * abs(objective_value)
        cand = _candidate_filter(instance, sol, config) if config.prune_candidates else None
        for swap in enumerate_swaps(sol.open_set, nf, config.p, rng, cand):
            d = _swap_delta(instance, sol, swap, config)
            if d < threshold and d < -1e-15:
                if config.pivot == "first":
                    improving = swap
                    break
                if d < best_gain:
                    best_gain, improving = d, swap
        if improving is None:
            trace.termination = "local-optimum"
            break
        phi_b = potential(instance, sol, config.params)
        cost_b = kmed_cost(instance, sol)
        sol = sol.with_swap(improving[0], improving[1])
        phi_a = potential(instance, sol, config.params)
        cost_a = kmed_cost(instance, sol)
        objective_value = _objective(instance, sol, config)
        trace.steps.append(TraceStep(trace.iterations, tuple(improving[0]), tuple(improving[1]),
                                     phi_b, phi_a, cost_b, cost_a,
                                     time.perf_counter() - t0))
    else:
        trace.termination = "iteration-cap"
    trace.seconds = time.perf_counter() - t0
    return sol, trace


def _objective(instance, sol, config):
    if config.objective == "cost":
        return kmed_cost(instance, sol)
    return potential(instance, sol, config.params)


def _swap_delta(instance, sol, swap, config):
    if config.objective == "cost":
        return cost_delta(instance, sol, swap)
    return delta(instance, sol, swap, config.params)


def _candidate_filter(instance, sol, config):
    """Optional pruning: keep facilities within the current assignment radius
    of some client (documented deviation, off by default)."""
    block = instance.client_facility_distances()
    radius = sol._cache_d[:, 0]
    keep = (block <= radius[:, None] + 1e-12).any(axis=0)
    return lambda f: bool(keep[f])


@dataclass
class OptimalityReport:
    objective: str
    p: int
    swaps_checked: int
    min_delta: float
    argmin: tuple | None
    certified: bool


def verify_local_optimality(instance, solution, p, objective="potential",
                            params=None, tolerance=1e-9):
    """Exhaustively check all swaps of size <= p; certified iff min delta >= -tolerance."""
    params = params or solution.params
    config = SearchConfig(k=solution.k, p=p, objective=objective, params=params)
    nf = instance.n_facilities
    min_d, argmin, count = math.inf, None, 0
    for swap in enumerate_swaps(solution.open_set, nf, p):
        d = _swap_delta(instance, solution, swap, config)
        count += 1
        if d < min_d:
            min_d, argmin = d, swap
    return OptimalityReport(objective, p, count, float(min_d), argmin,
                            certified=bool(min_d >= -tolerance))


def brute_force_opt(instance, k):
    """Exact k-median optimum by exhaustive enumeration (lexicographically first)."""
    nf = instance.n_facilities
    total = math.comb(nf, k)
    if total > BRUTE_FORCE_GUARD:
        raise ValueError(f"C({nf},{k}) = {total} exceeds brute-force guard {BRUTE_FORCE_GUARD}")
    block = instance.client_facility_distances()
    best_cost, best = math.inf, None
    batch, batch_size = [], 4096
    for combo in itertools.combinations(range(nf), k):
        batch.append(combo)
        if len(batch) == batch_size:
            best_cost, best = _scan_batch(block, batch, best_cost, best)
            batch = []
    if batch:
        best_cost, best = _scan_batch(block, batch, best_cost, best)
    return Solution(instance, best)


def _scan_batch(block, combos, best_cost, best):
    arr = np.array(combos, dtype=np.intp)           # (b, k)
    costs = block[:, arr].min(axis=2).sum(axis=0)   # (b,)
    i = int(np.argmin(costs))                       # first index on ties: lex order
    if costs[i] < best_cost:                        # strict: keeps lex-first optimum
        return float(costs[i]), list(combos[i])
    return best_cost, best
