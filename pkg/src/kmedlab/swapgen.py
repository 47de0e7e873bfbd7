"""Randomized generation of important swap sets from a (local, optimal) pair.

Two kinds are produced.  Simple swap sets map every optimal facility to one
of its two nearest local facilities and swap along the resulting stars.
Tree swap sets additionally map every local facility to its nearest optimal
facility, producing a 1-forest that is trimmed by removing heavy vertices
(with surrogate copies keeping the counts), cut into bounded-height pieces,
and finally merged into balanced groups.

Vertices of the working graphs are copies: ("L" | "O", facility index,
copy index).  Copy 0 is the original; copy 1 a local surrogate; copy 2 an
optimal surrogate; heavy-optimal decomposition uses copy indices >= 1 on
the "O" side.  Dummy cycle padding uses ("D", n, 0) vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEG_EPS_DEFAULT = 1 / 3


class InfeasibleBalanceError(RuntimeError):
    def __init__(self, required_r, got_r, detail=""):
        msg = (f"balancing infeasible: surplus r={got_r} cannot cover the deficits"
               f"{'; ' + detail if detail else ''}; the published sufficient bound is "
               f"r >= {required_r}")
        super().__init__(msg)
        self.required_r = required_r


# ---------------------------------------------------------------------------
# deterministic mapping layer
# ---------------------------------------------------------------------------

@dataclass
class AnalysisPair:
    """Distance blocks for a disjoint (local, optimal) facility pair.

    Sides are separate index spaces, so the same underlying facility may
    appear on both (the duplication convention for overlapping solutions).
    """
    n_clients: int
    n_local: int
    n_opt: int
    d_cl: np.ndarray   # (n_clients, n_local)
    d_co: np.ndarray   # (n_clients, n_opt)
    d_lo: np.ndarray   # (n_local, n_opt)
    local_labels: list = None
    opt_labels: list = None


def make_pair(instance, local_positions, opt_positions):
    block = instance.client_facility_distances()
    ff = instance.facility_facility_distances()
    lp = list(local_positions)
    op = list(opt_positions)
    return AnalysisPair(
        n_clients=instance.n_clients,
        n_local=len(lp), n_opt=len(op),
        d_cl=block[:, lp].copy(),
        d_co=block[:, op].copy(),
        d_lo=ff[np.ix_(lp, op)].copy(),
        local_labels=[str(instance.labels[instance.facilities[f]]) for f in lp],
        opt_labels=[str(instance.labels[instance.facilities[f]]) for f in op],
    )


@dataclass
class Mappings:
    eta1: np.ndarray   # per optimal facility: nearest local
    eta2: np.ndarray   # second nearest (-1 when only one local exists)
    rho: np.ndarray    # d(f*, eta1) / d(f*, eta2), in [0, 1]
    pi: np.ndarray     # per local facility: nearest optimal


def compute_mappings(pair):
    nL, nO = pair.n_local, pair.n_opt
    if nL < 2:
        raise ValueError("need at least two local facilities for eta2")
    eta1 = np.empty(nO, dtype=np.intp)
    eta2 = np.empty(nO, dtype=np.intp)
    rho = np.empty(nO)
    idx = np.arange(nL)
    for j in range(nO):
        order = np.lexsort((idx, pair.d_lo[:, j]))
        eta1[j], eta2[j] = order[0], order[1]
        d1, d2 = pair.d_lo[order[0], j], pair.d_lo[order[1], j]
        rho[j] = 1.0 if d2 == 0.0 else d1 / d2
    pi = np.empty(nL, dtype=np.intp)
    oidx = np.arange(nO)
    for i in range(nL):
        pi[i] = np.lexsort((oidx, pair.d_lo[i, :]))[0]
    return Mappings(eta1, eta2, rho, pi)


# ---------------------------------------------------------------------------
# tau sampling (Table-1 distributions)
# ---------------------------------------------------------------------------

def tau_probabilities(rho):
    """Joint (S1, S2, T1, T2) probabilities for one optimal facility."""
    if not (0.0 <= rho <= 1.0 + 1e-12):
        raise ValueError(f"rho={rho} outside [0, 1]")
    if rho <= 2 / 3:
        return (0.5, 0.0, 0.5, 0.0)
    if rho <= 3 / 4:
        return (0.5, 0.0, 0.25, 0.25)
    return (1.25 - rho, rho - 0.75, 0.25, 0.25)


def sample_tau(rho, kind, rng):
    """Draw eta1/eta2 for one optimal facility, conditional on the swap kind."""
    if not (0.0 <= rho <= 1.0 + 1e-12):
        raise ValueError(f"rho={rho} outside [0, 1]")
    if kind == "simple":
        if rho <= 3 / 4:
            return "eta1"
        return "eta1" if rng.random() < 2.5 - 2 * rho else "eta2"
    if kind == "tree":
        if rho <= 2 / 3:
            return "eta1"
        return "eta1" if rng.random() < 0.5 else "eta2"
    raise ValueError(f"unknown kind {kind!r}")


def sample_joint_event(rho, rng):
    """(kind, choice) with the unconditional four-event distribution."""
    kind = "simple" if rng.random() < 0.5 else "tree"
    return kind, sample_tau(rho, kind, rng)


# ---------------------------------------------------------------------------
# heavy facilities and candidates
# ---------------------------------------------------------------------------

def local_neighbor_sets(maps):
    """N(f*): {eta1} when rho <= 2/3, else {eta1, eta2}."""
    out = []
    for j in range(len(maps.eta1)):
        if maps.rho[j] <= 2 / 3:
            out.append((int(maps.eta1[j]),))
        else:
            out.append((int(maps.eta1[j]), int(maps.eta2[j])))
    return out


def heavy_local_facilities(pair, maps, t_d):
    """Locals that are a neighbor of more than t_d + 1 optimal facilities."""
    if t_d < 1:
        raise ValueError("t_d must be >= 1")
    counts = np.zeros(pair.n_local, dtype=int)
    for nbrs in local_neighbor_sets(maps):
        for f in nbrs:
            counts[f] += 1
    return set(np.where(counts > t_d + 1)[0].tolist())


def local_candidates(pair, maps, tau, heavy):
    """Non-heavy locals whose tau-preimage consists of opts with a heavy neighbor.

    Locals with an empty preimage qualify vacuously; the definition depends
    on the tau draw.
    """
    nbr = local_neighbor_sets(maps)
    pre = [[] for _ in range(pair.n_local)]
    for j, t in enumerate(tau):
        pre[t].append(j)
    cands = []
    for f in range(pair.n_local):
        if f in heavy:
            continue
        if all(any(x in heavy for x in nbr[j]) for j in pre[f]):
            cands.append(f)
    return cands


# ---------------------------------------------------------------------------
# swap sets
# ---------------------------------------------------------------------------

@dataclass
class Swap:
    closes: tuple          # local facility indices (deduplicated)
    opens: tuple           # optimal facility indices (deduplicated)
    local_copies: tuple    # the actual copies closed
    opt_copies: tuple
    component_ids: tuple   # which pre-balancing components were merged


@dataclass
class SwapSet:
    kind: str
    t_d: int
    tau: np.ndarray
    swaps: list
    heavy_locals: set
    local_surrogates: dict          # heavy local -> chosen candidate
    components: list                # list of (local_copies, opt_copies) pre-balancing
    component_conflicts: list       # edges of the conflict graph H
    merge_groups: list              # list of component-id lists
    t_h: int | None = None
    heavy_opts: set = field(default_factory=set)
    optimal_surrogates: list = field(default_factory=list)  # (opt, chosen local)
    deleted_out_edges: set = field(default_factory=set)     # tail copies of deleted real edges
    cycle_info: dict = field(default_factory=dict)          # comp id -> (real_len, padded_len, root_slot)
    copy_component: dict = field(default_factory=dict)      # vertex copy -> pre-balancing comp id

    def swaps_closing(self, local_f):
        return [i for i, s in enumerate(self.swaps) if local_f in s.closes]

    def swap_opening_original(self, opt_f):
        """Index of the swap containing the original copy of an optimal facility."""
        for i, s in enumerate(self.swaps):
            if ("O", int(opt_f), 0) in s.opt_copies:
                return i
        return None


def required_surplus(x, theta, eps):
    # integer arithmetic: x can be (t_d+1)^t_h, far beyond float range
    num = 16 * int(x) ** 5 * int(theta) ** 2 * (int(theta) + 1)
    inv = max(int(round(1e9 / eps)), 1)
    return -(-num * inv // 10 ** 9)


def balance(set_stats, conflict_edges, r, eps, rng, x=None, theta=None):
    """Merge sets so every group has at least as many greens as reds.

    ``set_stats``: (id, greens, reds, n_elements) per set.  Follows the
    constructive proof when its size thresholds are met (subgroup size
    8x^2*theta, part size x(theta+1)); below those thresholds a randomized
    greedy pairing enforces the structural properties exactly, with the
    pairwise-merge probability kept small by random choice over the whole
    positive pool.  Raises when the deficits cannot be covered at all.
    """
    ids = [s[0] for s in set_stats]
    disc = {s[0]: s[1] - s[2] for s in set_stats}
    adj = {i: set() for i in ids}
    for a, b in conflict_edges:
        adj[a].add(b)
        adj[b].add(a)
    if x is None:
        x = max((s[3] for s in set_stats), default=1)
    if theta is None:
        theta = max((len(v) for v in adj.values()), default=0)
    req = required_surplus(x, max(theta, 1), eps)

    groups = []
    zeros = [i for i in ids if disc[i] == 0]
    groups.extend([i] for i in zeros)
    pos = {i for i in ids if disc[i] > 0}
    neg = {i for i in ids if disc[i] < 0}

    # proof regime: pair large D_i with large D_{-j} through random subgroups
    inv = max(int(round(1e9 / eps)), 1)
    sub_thresh = -(-8 * int(x) * int(x) * max(int(theta), 1) * inv // 10 ** 9)
    by_disc = {}
    for i in pos | neg:
        by_disc.setdefault(disc[i], set()).add(i)

    def pick_conflict_free(pool, count):
        chosen = []
        pool = list(pool)
        rng.shuffle(pool)
        for cand in pool:
            if len(chosen) == count:
                break
            if all(cand not in adj[c] for c in chosen):
                chosen.append(cand)
        return chosen if len(chosen) == count else None

    changed = True
    while changed:
        changed = False
        for i in sorted(d for d in by_disc if d > 0):
            for j in sorted(-d for d in by_disc if d < 0):
                di, dj = by_disc.get(i, set()), by_disc.get(-j, set())
                if len(di) < sub_thresh or len(dj) < sub_thresh:
                    continue
                sub_i = rng.permutation(sorted(di))[:max(8 * x * x * max(theta, 1), j)]
                sub_j = rng.permutation(sorted(dj))[:max(8 * x * x * max(theta, 1), i)]
                take_i = pick_conflict_free(list(sub_i), j)
                take_j = None
                if take_i is not None:
                    merged = set(take_i)
                    cand = [c for c in sub_j if all(c not in adj[m] for m in merged)]
                    take_j = pick_conflict_free(cand, i)
                if take_i is None or take_j is None:
                    continue
                groups.append(list(take_i) + list(take_j))
                for t in take_i:
                    di.discard(t); pos.discard(t)
                for t in take_j:
                    dj.discard(t); neg.discard(t)
                changed = True

    # large-D_j regime: build positive groups of x sets, hang negatives on them
    part_size = x * (max(theta, 1) + 1)
    big = [d for d in by_disc if d > 0 and len(by_disc[d]) >= max(r // max(x, 1), 2 * part_size)]
    positive_groups = []
    if big and neg:
        j = max(big, key=lambda d: len(by_disc[d]))
        dj = sorted(by_disc[j] & pos)
        dj = list(rng.permutation(dj))
        parts = [dj[i:i + part_size] for i in range(0, len(dj) - part_size + 1, part_size)]
        for part in parts:
            grp = pick_conflict_free(part, x)
            if grp:
                positive_groups.append(grp)
                for g in grp:
                    pos.discard(g)
                    by_disc[j].discard(g)
        eligible = [g for g in positive_groups
                    if all(all(n not in adj[m] for m in g) for n in neg)]
        rng.shuffle(eligible)
        for n in sorted(neg, key=lambda i: disc[i]):
            if not eligible:
                break
            grp = eligible.pop()
            grp.append(n)
            neg.discard(n)
        groups.extend(positive_groups)
        positive_groups = []

    # greedy pairing for whatever is left (the desk-scale path)
    pool = sorted(pos)
    rng.shuffle(pool)
    for n in sorted(neg, key=lambda i: disc[i]):
        need = -disc[n]
        grp = [n]
        got = 0
        for cand in list(pool):
            if got >= need:
                break
            if any(cand in adj[m] for m in grp):
                continue
            grp.append(cand)
            pool.remove(cand)
            got += disc[cand]
        if got < need:
            raise InfeasibleBalanceError(req, r, f"set {n} with deficit {need} uncovered")
        groups.append(grp)
    groups.extend([p] for p in pool)
    return groups


# ---------------------------------------------------------------------------
# simple swap sets
# ---------------------------------------------------------------------------

def generate_simple(pair, t_d, rng, maps=None, eps=DEG_EPS_DEFAULT, strict_r=False):
    """One draw of the simple important-swap set."""
    maps = maps or compute_mappings(pair)
    nL, nO = pair.n_local, pair.n_opt
    r = nL - nO
    if r < 0:
        raise ValueError("need at least as many local as optimal facilities")
    x = t_d + 2
    if strict_r and r < required_surplus(x, 1, eps):
        raise InfeasibleBalanceError(required_surplus(x, 1, eps), r)

    tau = np.array([int(maps.eta1[j]) if sample_tau(maps.rho[j], "simple", rng) == "eta1"
                    else int(maps.eta2[j]) for j in range(nO)], dtype=np.intp)
    heavy = heavy_local_facilities(pair, maps, t_d)
    cands = local_candidates(pair, maps, tau, heavy)
    if len(heavy) > len(cands):
        raise InfeasibleBalanceError(required_surplus(x, 1, eps), r,
                                     "fewer local candidates than heavy facilities")
    order = list(rng.permutation(len(cands)))
    surrogates = {h: cands[order[i]] for i, h in enumerate(sorted(heavy))}

    components = []   # (local_copies, opt_copies)
    comp_of = {}

    def new_comp(local_copies, opt_copies):
        cid = len(components)
        components.append((tuple(local_copies), tuple(opt_copies)))
        for v in list(local_copies) + list(opt_copies):
            comp_of[v] = cid
        return cid

    star_opts = {}
    for j in range(nO):
        star_opts.setdefault(int(tau[j]), []).append(j)
    for f in range(nL):
        if f in heavy:
            continue
        opts = [("O", j, 0) for j in star_opts.get(f, [])]
        new_comp([("L", f, 0)], opts)
    for j in range(nO):
        if int(tau[j]) in heavy:
            new_comp([], [("O", j, 0)])
    for h in sorted(heavy):
        new_comp([("L", surrogates[h], 1)], [])

    conflicts = []
    for h, s in surrogates.items():
        a = comp_of[("L", s, 0)]
        b = comp_of[("L", s, 1)]
        conflicts.append((a, b))

    stats = [(cid, len(lc), len(oc), len(lc) + len(oc))
             for cid, (lc, oc) in enumerate(components)]
    groups = balance(stats, conflicts, r, eps, rng, x=x, theta=1)

    swaps = []
    for grp in groups:
        lc, oc = [], []
        for cid in grp:
            lc.extend(components[cid][0])
            oc.extend(components[cid][1])
        swaps.append(Swap(
            closes=tuple(sorted({v[1] for v in lc})),
            opens=tuple(sorted({v[1] for v in oc})),
            local_copies=tuple(lc), opt_copies=tuple(oc),
            component_ids=tuple(grp)))
    return SwapSet(kind="simple", t_d=t_d, tau=tau, swaps=swaps,
                   heavy_locals=heavy, local_surrogates=surrogates,
                   components=components, component_conflicts=conflicts,
                   merge_groups=groups, copy_component=comp_of)


# ---------------------------------------------------------------------------
# tree swap sets
# ---------------------------------------------------------------------------

def sample_height_threshold(eps, rng):
    base = math.ceil(1 / eps)
    choices = [2 * base ** i for i in range(1, base + 1)]
    return int(choices[rng.integers(0, len(choices))])


def generate_tree(pair, t_d, rng, maps=None, eps=DEG_EPS_DEFAULT, t_h=None, strict_r=False):
    """One draw of the tree important-swap set."""
    maps = maps or compute_mappings(pair)
    nL, nO = pair.n_local, pair.n_opt
    r = nL - nO
    if r < 0:
        raise ValueError("need at least as many local as optimal facilities")
    if t_h is None:
        t_h = sample_height_threshold(eps, rng)
    x_bound = (t_d + 1) ** t_h  # component size cap before balancing
    if strict_r and r < required_surplus(x_bound, 2 * x_bound, eps):
        raise InfeasibleBalanceError(required_surplus(x_bound, 2 * x_bound, eps), r)

    tau = np.array([int(maps.eta1[j]) if sample_tau(maps.rho[j], "tree", rng) == "eta1"
                    else int(maps.eta2[j]) for j in range(nO)], dtype=np.intp)
    heavy = heavy_local_facilities(pair, maps, t_d)
    cands = local_candidates(pair, maps, tau, heavy)
    if len(heavy) > len(cands):
        raise InfeasibleBalanceError(required_surplus(x_bound, 1, eps), r,
                                     "fewer local candidates than heavy facilities")
    order = list(rng.permutation(len(cands)))
    surrogates = {h: cands[order[i]] for i, h in enumerate(sorted(heavy))}

    out = {}
    # local out-edges: original copies of non-heavy locals point to pi
    for f in range(nL):
        if f not in heavy:
            out[("L", f, 0)] = ("O", int(maps.pi[f]), 0)
    # local surrogate copies: no out-edge yet (self-loop below)
    for h in sorted(heavy):
        out[("L", surrogates[h], 1)] = None
    # optimal out-edges: to the original copy of tau unless tau is heavy
    for j in range(nO):
        t = int(tau[j])
        out[("O", j, 0)] = ("L", t, 0) if t not in heavy else None

    # heavy-optimal decomposition
    heavy_opts = set()
    optimal_surrogates = []
    children_of = {}
    for v, w in out.items():
        if w is not None and w[0] == "O":
            children_of.setdefault(w[1], []).append(v)
    for j in range(nO):
        kids = [v for v in children_of.get(j, []) if v[0] == "L"]
        if len(kids) <= t_d:
            continue
        heavy_opts.add(j)
        kids.sort(key=lambda v: (pair.d_lo[v[1], j], v[1]))
        ngroups = math.ceil(len(kids) / t_d)
        for g in range(1, ngroups):
            new_opt = ("O", j, g)
            for v in kids[g * t_d:(g + 1) * t_d]:
                out[v] = new_opt
            prev = kids[(g - 1) * t_d:g * t_d]
            pick = prev[rng.integers(0, len(prev))]
            surr = ("L", pick[1], 2)
            optimal_surrogates.append((j, pick[1]))
            out[new_opt] = surr
            out[surr] = new_opt

    # self-loops for vertices with no out-edge
    for v, w in list(out.items()):
        if w is None:
            out[v] = v

    # connected components of the 1-forest
    comp_of = {}
    comp_members = []
    undirected = {}
    for v, w in out.items():
        undirected.setdefault(v, set()).add(w)
        undirected.setdefault(w, set()).add(v)
    for v in sorted(out):
        if v in comp_of:
            continue
        cid = len(comp_members)
        stack, members = [v], []
        comp_of[v] = cid
        while stack:
            u = stack.pop()
            members.append(u)
            for w in undirected[u]:
                if w not in comp_of:
                    comp_of[w] = cid
                    stack.append(w)
        comp_members.append(sorted(members))

    # edge deletion per component
    deleted = set()          # tail vertices of deleted real out-edges
    cycle_info = {}
    final_comp_of = {}
    final_components = []

    for cid, members in enumerate(comp_members):
        root_slot = None  # drawn inside cut_component
        pieces, cut_tails, info = cut_component(out, members, t_h, rng)
        cycle_info[cid] = info
        deleted.update(cut_tails)
        for mem in pieces:
            fid = len(final_components)
            for u in mem:
                final_comp_of[u] = fid
            final_components.append(sorted(mem))

    components = []
    for mem in final_components:
        lc = tuple(v for v in mem if v[0] == "L")
        oc = tuple(v for v in mem if v[0] == "O")
        components.append((lc, oc))

    # conflict graph: no two copies of the same local facility may merge
    copies_of = {}
    for cid, (lc, _) in enumerate(components):
        for v in lc:
            copies_of.setdefault(v[1], []).append(cid)
    conflicts = []
    for f, cids in copies_of.items():
        cids = sorted(set(cids))
        for i in range(len(cids)):
            for j in range(i + 1, len(cids)):
                conflicts.append((cids[i], cids[j]))

    stats = [(cid, len(lc), len(oc), len(lc) + len(oc))
             for cid, (lc, oc) in enumerate(components)]
    groups = balance(stats, conflicts, r, eps, rng, x=x_bound)

    swaps = []
    for grp in groups:
        lc, oc = [], []
        for cid in grp:
            lc.extend(components[cid][0])
            oc.extend(components[cid][1])
        swaps.append(Swap(
            closes=tuple(sorted({v[1] for v in lc})),
            opens=tuple(sorted({v[1] for v in oc})),
            local_copies=tuple(lc), opt_copies=tuple(oc),
            component_ids=tuple(grp)))
    return SwapSet(kind="tree", t_d=t_d, tau=tau, swaps=swaps,
                   heavy_locals=heavy, local_surrogates=surrogates,
                   components=components, component_conflicts=conflicts,
                   merge_groups=groups, t_h=t_h, heavy_opts=heavy_opts,
                   optimal_surrogates=optimal_surrogates,
                   deleted_out_edges=deleted, cycle_info=cycle_info,
                   copy_component=final_comp_of)


def _find_cycle(out, start):
    """The unique cycle of the 1-tree containing ``start``, in edge order."""
    seen = {}
    v = start
    step = 0
    while v not in seen:
        seen[v] = step
        v = out[v]
        step += 1
    cyc = []
    u = v
    while True:
        cyc.append(u)
        u = out[u]
        if u == v:
            break
    return cyc


def cut_component(out, members, t_h, rng, root_slot=None):
    """Edge deletion on one 1-tree: cut every out-edge whose tail sits at a
    level divisible by t_h, measured from a root chosen uniformly on the
    dummy-padded cycle.

    Returns (pieces, deleted_tails, (cycle_len, padded_len, root_slot)).
    Cycle edges are kept whole when the cycle is short (<= t_h); each
    returned piece is then a tree of height at most t_h - 1, except the
    piece holding a short cycle, whose height is measured from the cycle.
    """
    cyc = _find_cycle(out, members[0])
    ell = len(cyc)
    cyc_set = set(cyc)
    padded = max(ell, t_h)
    if root_slot is None:
        root_slot = int(rng.integers(0, padded))
    slot_of = {v: i for i, v in enumerate(cyc)}
    short_cycle = ell <= t_h
    cut = set()

    def ring_level(slot):
        return (root_slot - slot) % padded

    depth_cache = {}

    def depth_and_attach(v):
        trail = []
        u = v
        while u not in cyc_set and u not in depth_cache:
            trail.append(u)
            u = out[u]
        base, attach = (0, u) if u in cyc_set else depth_cache[u]
        for w in reversed(trail):
            base += 1
            depth_cache[w] = (base, attach)
        return depth_cache.get(v, (0, v if v in cyc_set else attach))

    for v in members:
        if v in cyc_set:
            if not short_cycle and ring_level(slot_of[v]) % t_h == 0:
                cut.add(v)
        else:
            depth, attach = depth_and_attach(v)
            lev = depth + ring_level(slot_of[attach])
            if lev % t_h == 0:
                cut.add(v)

    deleted_tails = {v for v in cut if out[v] != v}

    local_adj = {v: set() for v in members}
    for v in members:
        w = out[v]
        if v in cut or w == v:
            continue
        local_adj[v].add(w)
        local_adj[w].add(v)
    if short_cycle and ell > 1:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            local_adj[a].add(b)
            local_adj[b].add(a)
            deleted_tails.discard(a)
    elif short_cycle:
        deleted_tails.discard(cyc[0])

    pieces, seen = [], set()
    for v in sorted(members):
        if v in seen:
            continue
        stack, mem = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            mem.append(u)
            for w in local_adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        pieces.append(mem)
    return pieces, deleted_tails, (ell, padded, root_slot)


def generate(pair, rng, t_d=None, eps=DEG_EPS_DEFAULT, maps=None, strict_r=False):
    """Fair-coin simple/tree draw, the top-level entry the analysis uses."""
    if t_d is None:
        t_d = math.ceil(1 / eps)
    maps = maps or compute_mappings(pair)
    if rng.random() < 0.5:
        return generate_simple(pair, t_d, rng, maps=maps, eps=eps, strict_r=strict_r)
    return generate_tree(pair, t_d, rng, maps=maps, eps=eps, strict_r=strict_r)
