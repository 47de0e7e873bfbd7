import math

import numpy as np
import pytest

from kmedlab.gaps import biclique, random_euclidean
from kmedlab.potential import (
    PotentialParams, Solution, client_potential, cost_delta, delta,
    kmed_cost, potential,
)

PARAMS = PotentialParams()  # alpha=3, beta=1/5


def brute_potential(instance, open_set, params):
    block = instance.client_facility_distances()
    total = 0.0
    for c in range(instance.n_clients):
        ds = np.sort(block[c, list(open_set)])
        d1 = ds[0]
        d2 = ds[1] if len(ds) > 1 else math.inf
        total += client_potential(d1, d2, params)
    return total


def test_client_potential_paper_values():
    d = 7.3
    assert client_potential(d, d, PARAMS) == pytest.approx(1.2 * d)
    assert client_potential(d, 3.5 * d, PARAMS) == pytest.approx(1.6 * d)
    # truncation at alpha*d1 = 0 kills the backup term entirely
    assert client_potential(0.0, 123.0, PARAMS) == 0.0


def test_client_potential_zero_and_errors():
    assert client_potential(0.0, 0.0, PARAMS) == 0.0
    with pytest.raises(ValueError):
        client_potential(2.0, 1.0, PARAMS)


def test_kmed_cost_single_client():
    from kmedlab.metric import from_arrays
    m = np.array([[0, 5], [5, 0]], dtype=float)
    inst = from_arrays(matrix=m, clients=[0], facilities=[1])
    sol = Solution(inst, [0])
    assert kmed_cost(inst, sol) == 5.0


def test_biclique_costs_and_potential():
    gap = biclique(3, 0, 2.0)
    inst = gap.instance
    local = Solution(inst, gap.local_positions)
    opt = Solution(inst, gap.optimal_positions)
    assert kmed_cost(inst, local) == pytest.approx(18.0)
    assert kmed_cost(inst, opt) == pytest.approx(9.0)
    # each client: d1=2, d2=4 -> phi = 2 + 0.2*4 = 2.8
    assert potential(inst, local) == pytest.approx(25.2)
    assert potential(inst, local) == pytest.approx(brute_potential(inst, local.open_set, PARAMS))


def test_homogeneity_under_scaling():
    gap1 = biclique(3, 1, 1.7)
    gap2 = biclique(3, 1, 1.7)
    gap2.instance._matrix = gap2.instance._matrix * 2.0
    gap2.instance._cf_block = None
    s1 = Solution(gap1.instance, gap1.local_positions)
    s2 = Solution(gap2.instance, gap2.local_positions)
    assert potential(gap2.instance, s2) == pytest.approx(2.0 * potential(gap1.instance, s1))


def test_potential_sandwich_bounds():
    inst = random_euclidean(25, 12, seed=5)
    sol = Solution(inst, [0, 3, 7, 9])
    c = kmed_cost(inst, sol)
    phi = potential(inst, sol)
    ab = PARAMS.alpha * PARAMS.beta
    assert c <= phi + 1e-12
    assert phi <= (1 + ab) * c + 1e-12


def test_single_open_facility_uses_truncation():
    inst = random_euclidean(10, 4, seed=1)
    sol = Solution(inst, [2])
    block = inst.client_facility_distances()
    expect = sum((1 + PARAMS.alpha * PARAMS.beta) * block[c, 2] for c in range(10))
    assert potential(inst, sol) == pytest.approx(expect)


def test_delta_identity_swap_is_zero():
    inst = random_euclidean(15, 8, seed=2)
    sol = Solution(inst, [1, 4, 6])
    assert delta(inst, sol, ((), ())) == 0.0


def test_delta_matches_full_recomputation_random_swaps():
    rng = np.random.default_rng(11)
    inst = random_euclidean(30, 14, seed=3)
    open_set = [0, 2, 5, 8, 11]
    sol = Solution(inst, open_set)
    phi0 = potential(inst, sol)
    for _ in range(300):
        s = int(rng.integers(1, 3))
        close = list(rng.choice(open_set, size=s, replace=False))
        outside = [f for f in range(14) if f not in open_set]
        open_ = list(rng.choice(outside, size=s, replace=False))
        d = delta(inst, sol, (close, open_))
        full = brute_potential(inst, set(open_set) - set(close) | set(open_), PARAMS) - phi0
        assert d == pytest.approx(full, abs=1e-9)


def test_delta_allows_q_intersecting_open_set():
    inst = random_euclidean(12, 6, seed=9)
    sol = Solution(inst, [0, 1, 2])
    # opening something already open changes nothing
    assert delta(inst, sol, ((), (1,))) == pytest.approx(0.0, abs=1e-12)
    # |Q| < |P| is allowed by the extended definition
    d = delta(inst, sol, ((0, 1), (3,)))
    full = brute_potential(inst, {2, 3}, PARAMS) - brute_potential(inst, {0, 1, 2}, PARAMS)
    assert d == pytest.approx(full, abs=1e-9)


def test_delta_antisymmetric_under_revert():
    inst = random_euclidean(20, 9, seed=4)
    sol = Solution(inst, [0, 3, 6])
    swap = ((3,), (7,))
    d1 = delta(inst, sol, swap)
    sol2 = sol.with_swap(*swap)
    d2 = delta(inst, sol2, ((7,), (3,)))
    assert d1 == pytest.approx(-d2, abs=1e-9)


def test_incremental_random_swap_sequences():
    rng = np.random.default_rng(21)
    inst = random_euclidean(25, 10, seed=6)
    sol = Solution(inst, [0, 1, 2, 3])
    for _ in range(1000):
        outside = [f for f in range(10) if f not in sol.open_set]
        f_out = int(rng.choice(list(sol.open_set)))
        f_in = int(rng.choice(outside))
        d = delta(inst, sol, ((f_out,), (f_in,)))
        before = brute_potential(inst, sol.open_set, PARAMS)
        sol = sol.with_swap((f_out,), (f_in,))
        after = brute_potential(inst, sol.open_set, PARAMS)
        assert d == pytest.approx(after - before, abs=1e-9)


def test_cost_delta_matches_recomputation():
    rng = np.random.default_rng(31)
    inst = random_euclidean(22, 11, seed=8)
    open_set = [0, 4, 7, 10]
    sol = Solution(inst, open_set)
    block = inst.client_facility_distances()
    for _ in range(200):
        s = int(rng.integers(1, 3))
        close = list(rng.choice(open_set, size=s, replace=False))
        outside = [f for f in range(11) if f not in open_set]
        open_ = list(rng.choice(outside, size=s, replace=False))
        survivors = sorted(set(open_set) - set(close) | set(open_))
        full = block[:, survivors].min(axis=1).sum() - block[:, open_set].min(axis=1).sum()
        assert cost_delta(inst, sol, (close, open_)) == pytest.approx(full, abs=1e-9)


def test_q3_params_and_potential():
    p3 = PotentialParams.phi3_paper()
    assert p3.beta3 == pytest.approx(0.102)
    # with d3 far away the third term truncates at alpha3*d1
    v = client_potential(1.0, 2.0, p3, d3=100.0)
    assert v == pytest.approx(1.0 + 0.3 * 2.0 + 0.102 * 2.5)
