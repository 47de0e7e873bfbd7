import math
from collections import Counter, defaultdict

import numpy as np
import pytest

from kmedlab.gaps import random_euclidean
from kmedlab.swapgen import (
    AnalysisPair, compute_mappings, generate, generate_simple, generate_tree,
    heavy_local_facilities, local_candidates, make_pair, sample_joint_event,
    sample_tau, tau_probabilities,
)


def euclid_pair(n_clients=20, n_local=12, n_opt=7, seed=0):
    inst = random_euclidean(n_clients, n_local + n_opt, seed=seed)
    return make_pair(inst, list(range(n_local)), list(range(n_local, n_local + n_opt)))


# -- tau distributions ---------------------------------------------------------

def test_tau_probability_table():
    assert tau_probabilities(0.5) == (0.5, 0.0, 0.5, 0.0)
    assert tau_probabilities(0.7) == (0.5, 0.0, 0.25, 0.25)
    p = tau_probabilities(0.9)
    assert p[0] == pytest.approx(0.35)
    assert p[1] == pytest.approx(0.15)
    assert p[2] == p[3] == 0.25
    with pytest.raises(ValueError):
        tau_probabilities(1.5)


@pytest.mark.parametrize("rho", [0.5, 0.7, 0.9])
def test_joint_event_frequencies_within_3_sigma(rho):
    rng = np.random.default_rng(123)
    n = 100_000
    counts = Counter(sample_joint_event(rho, rng) for _ in range(n))
    expect = dict(zip(
        [("simple", "eta1"), ("simple", "eta2"), ("tree", "eta1"), ("tree", "eta2")],
        tau_probabilities(rho)))
    for ev, p in expect.items():
        got = counts.get(ev, 0) / n
        sigma = math.sqrt(p * (1 - p) / n) if 0 < p < 1 else 0.0
        assert abs(got - p) <= 3 * sigma + 1e-12, (ev, got, p)


def test_sample_tau_is_deterministic_on_forced_ranges():
    rng = np.random.default_rng(0)
    assert all(sample_tau(0.6, "simple", rng) == "eta1" for _ in range(50))
    assert all(sample_tau(0.74, "simple", rng) == "eta1" for _ in range(50))
    assert all(sample_tau(0.6, "tree", rng) == "eta1" for _ in range(50))


# -- heavy facilities and candidates --------------------------------------------

def shared_nearest_pair():
    # 6 optimal facilities all nearest to local 0; local 1 is everyone's eta2
    n_opt, n_local = 6, 4
    d_lo = np.full((n_local, n_opt), 10.0)
    d_lo[0, :] = 1.0
    d_lo[1, :] = 1.2  # rho = 1/1.2 > 2/3: both eta1 and eta2 are neighbors
    return AnalysisPair(n_clients=1, n_local=n_local, n_opt=n_opt,
                        d_cl=np.ones((1, n_local)), d_co=np.ones((1, n_opt)),
                        d_lo=d_lo)


def test_heavy_when_all_share_one_nearest():
    pair = shared_nearest_pair()
    maps = compute_mappings(pair)
    heavy = heavy_local_facilities(pair, maps, t_d=2)
    assert heavy == {0, 1}  # both appear in more than t_d+1 = 3 neighbor sets


def test_bijective_maps_have_no_heavy():
    d_lo = np.full((5, 5), 9.0)
    np.fill_diagonal(d_lo, 1.0)
    pair = AnalysisPair(1, 5, 5, np.ones((1, 5)), np.ones((1, 5)), d_lo)
    maps = compute_mappings(pair)
    assert heavy_local_facilities(pair, maps, t_d=1) == set()


def test_heavy_matches_recount_oracle():
    pair = euclid_pair(seed=5)
    maps = compute_mappings(pair)
    t_d = 2
    heavy = heavy_local_facilities(pair, maps, t_d)
    counts = defaultdict(int)
    for j in range(pair.n_opt):
        counts[int(maps.eta1[j])] += 1
        if maps.rho[j] > 2 / 3:
            counts[int(maps.eta2[j])] += 1
    expect = {f for f, c in counts.items() if c > t_d + 1}
    assert heavy == expect


def test_candidate_count_claim_on_every_draw():
    # local candidates >= (t_d/2) * heavy count, for every tau draw
    pair = shared_nearest_pair()
    maps = compute_mappings(pair)
    rng = np.random.default_rng(7)
    t_d = 2
    heavy = heavy_local_facilities(pair, maps, t_d)
    for _ in range(200):
        tau = [int(maps.eta1[j]) if sample_tau(maps.rho[j], "simple", rng) == "eta1"
               else int(maps.eta2[j]) for j in range(pair.n_opt)]
        cands = local_candidates(pair, maps, tau, heavy)
        assert len(cands) >= (t_d / 2) * len(heavy)


# -- simple swap sets ------------------------------------------------------------

def test_simple_no_heavy_structure():
    pair = euclid_pair(n_local=10, n_opt=5, seed=11)
    maps = compute_mappings(pair)
    rng = np.random.default_rng(3)
    ss = generate_simple(pair, t_d=3, rng=rng, maps=maps)
    assert ss.kind == "simple"
    # every optimal facility's original copy appears in exactly one swap
    for j in range(pair.n_opt):
        owners = [s for s in ss.swaps if ("O", j, 0) in s.opt_copies]
        assert len(owners) == 1
    # each component holds at most one local facility
    for lc, oc in ss.components:
        assert len(lc) <= 1
    # swap validity: |Q| <= |P|, closes each local <= twice (orig + surrogate)
    closed = Counter()
    for s in ss.swaps:
        assert len(s.opens) <= len(s.closes) or not s.closes
        for v in s.local_copies:
            closed[v[1]] += 1
    assert all(c <= 2 for c in closed.values())


def test_simple_component_size_cap():
    pair = euclid_pair(n_local=14, n_opt=9, seed=13)
    rng = np.random.default_rng(5)
    for _ in range(100):
        ss = generate_simple(pair, t_d=3, rng=rng)
        for lc, oc in ss.components:
            assert len(lc) + len(oc) <= 3 + 2


def heavy_generation_pair():
    # 6 optimal facilities share locals 0 and 1 as their two nearest; 8 locals
    n_opt, n_local = 6, 8
    d_lo = np.full((n_local, n_opt), 10.0)
    d_lo[0, :] = 1.0
    d_lo[1, :] = 1.2
    rng = np.random.default_rng(99)
    d_lo[2:, :] += rng.uniform(0, 0.5, size=(n_local - 2, n_opt))
    return AnalysisPair(n_clients=2, n_local=n_local, n_opt=n_opt,
                        d_cl=np.ones((2, n_local)), d_co=np.ones((2, n_opt)),
                        d_lo=d_lo)


def test_simple_surrogate_frequency_bound():
    pair = heavy_generation_pair()
    maps = compute_mappings(pair)
    t_d = 2
    rng = np.random.default_rng(17)
    n = 4000
    chosen = Counter()
    for _ in range(n):
        ss = generate_simple(pair, t_d, rng, maps=maps)
        assert ss.heavy_locals == {0, 1}
        for h, s in ss.local_surrogates.items():
            chosen[s] += 1
        # surrogates only come from candidates; candidates are never heavy
        assert not (set(ss.local_surrogates.values()) & ss.heavy_locals)
    for f, c in chosen.items():
        p_hat = c / n
        bound = 2 / t_d
        sigma = math.sqrt(bound * (1 - bound) / n)
        assert p_hat <= bound + 3 * sigma, (f, p_hat)


def test_simple_balancing_properties_every_draw():
    pair = euclid_pair(n_clients=10, n_local=16, n_opt=8, seed=23)
    rng = np.random.default_rng(29)
    for _ in range(300):
        ss = generate_simple(pair, t_d=3, rng=rng)
        x = max(len(lc) + len(oc) for lc, oc in ss.components)
        conf = set(map(frozenset, ss.component_conflicts))
        for grp, swap in zip(ss.merge_groups, ss.swaps):
            greens = sum(len(ss.components[c][0]) for c in grp)
            reds = sum(len(ss.components[c][1]) for c in grp)
            assert reds <= greens                      # (ii)
            size = sum(len(ss.components[c][0]) + len(ss.components[c][1]) for c in grp)
            assert size <= 2 * x * x                   # (i)
            for a in grp:                              # (iii)
                for b in grp:
                    if a != b:
                        assert frozenset((a, b)) not in conf


def test_pairwise_merge_frequency_bounded():
    # fix one draw's components, re-balance many times, measure pair frequencies
    from kmedlab.swapgen import balance
    pair = euclid_pair(n_clients=10, n_local=24, n_opt=10, seed=31)
    maps = compute_mappings(pair)
    rng = np.random.default_rng(37)
    ss = generate_simple(pair, t_d=3, rng=rng, maps=maps)
    stats = [(cid, len(lc), len(oc), len(lc) + len(oc))
             for cid, (lc, oc) in enumerate(ss.components)]
    eps = 1 / 3
    n = 2000
    together = Counter()
    for i in range(n):
        groups = balance(stats, ss.component_conflicts, pair.n_local - pair.n_opt,
                         eps, np.random.default_rng(1000 + i))
        for grp in groups:
            for a in grp:
                for b in grp:
                    if a < b:
                        together[(a, b)] += 1
    for pair_ids, c in together.items():
        assert c / n <= eps, (pair_ids, c / n)


# -- tree swap sets ---------------------------------------------------------------

def test_tree_two_cycle_never_cut():
    # single optimal facility with two locals pointing at it: 2-cycle survives
    d_lo = np.array([[1.0], [2.0]])
    pair = AnalysisPair(1, 2, 1, np.ones((1, 2)), np.ones((1, 1)), d_lo)
    maps = compute_mappings(pair)
    rng = np.random.default_rng(0)
    for _ in range(100):
        ts = generate_tree(pair, t_d=2, rng=rng, maps=maps)
        # the opt and its tau target stay in one swap; tau = eta1 since rho = 1/2
        sw = [s for s in ts.swaps if 0 in s.opens]
        assert len(sw) == 1
        assert 0 in sw[0].closes
        assert not ts.deleted_out_edges or all(v[0] != "O" for v in ts.deleted_out_edges)


def test_tree_heavy_opt_decomposition_shape():
    # one optimal facility with 5 local children, t_d = 2 -> 3 copies, 2 surrogates
    n_local, n_opt = 5, 1
    d_lo = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
    pair = AnalysisPair(1, n_local, n_opt, np.ones((1, n_local)), np.ones((1, n_opt)), d_lo)
    maps = compute_mappings(pair)
    rng = np.random.default_rng(1)
    ts = generate_tree(pair, t_d=2, rng=rng, maps=maps)
    assert ts.heavy_opts == {0}
    assert len(ts.optimal_surrogates) == 2
    copies = {v for lc, oc in ts.components for v in oc if v[1] == 0}
    assert len(copies) == 3
    # surrogate of group g comes from the immediately preceding group
    kids_sorted = [0, 1, 2, 3, 4]
    g1_prev, g2_prev = set(kids_sorted[0:2]), set(kids_sorted[2:4])
    (j1, s1), (j2, s2) = ts.optimal_surrogates
    assert s1 in g1_prev and s2 in g2_prev


def test_tree_one_forest_structure_and_multiplicity():
    pair = euclid_pair(n_clients=12, n_local=14, n_opt=7, seed=41)
    rng = np.random.default_rng(43)
    for _ in range(50):
        ts = generate_tree(pair, t_d=3, rng=rng)
        copies = Counter()
        for lc, oc in ts.components:
            for v in lc:
                copies[("L", v[1])] += 1
            # no two copies of the same facility inside one component
            ids = [v[1] for v in lc]
            assert len(ids) == len(set(ids))
        for f, c in copies.items():
            assert c <= 3  # original + local surrogate + optimal surrogate
        # every optimal facility opened somewhere as original copy
        for j in range(pair.n_opt):
            assert ts.swap_opening_original(j) is not None


def test_tree_components_height_bounded():
    pair = euclid_pair(n_clients=12, n_local=18, n_opt=9, seed=47)
    rng = np.random.default_rng(53)
    for _ in range(50):
        ts = generate_tree(pair, t_d=2, rng=rng, eps=1 / 2)  # t_h in {4, 8}
        for lc, oc in ts.components:
            assert len(lc) + len(oc) <= (2 + 1) ** ts.t_h


def test_tree_edge_deletion_frequency():
    # every non-cycle edge is deleted with probability <= 2/t_h
    pair = euclid_pair(n_clients=8, n_local=12, n_opt=6, seed=59)
    maps = compute_mappings(pair)
    t_h = 6
    n = 3000
    present = Counter()
    deleted = Counter()
    for i in range(n):
        rng = np.random.default_rng(2000 + i)
        ts = generate_tree(pair, t_d=3, rng=rng, maps=maps, t_h=t_h)
        for v in ts.deleted_out_edges:
            deleted[v] += 1
        present.update(ts.copy_component.keys())
    for v, dcount in deleted.items():
        freq = dcount / n
        bound = 2 / t_h
        sigma = math.sqrt(bound * (1 - bound) / n)
        assert freq <= bound + 3 * sigma, (v, freq)


def test_generate_top_level_flips_kinds():
    pair = euclid_pair(seed=61)
    rng = np.random.default_rng(67)
    kinds = Counter(generate(pair, rng, eps=1 / 3).kind for _ in range(200))
    assert kinds["simple"] > 50 and kinds["tree"] > 50
