"""Client taxonomy, amenable/defiant events, and per-client verification.

A client profile fixes its two nearest local facilities, nearest optimal
facility, that facility's two nearest locals, and the secondary pair
(g*, g) used by the C/D letters.  Against each generated swap set, the
client's summed potential change is computed exactly and checked against
the per-event bound rows, against the crude fallback, and in aggregate
against the per-type expected-change coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import boundtables as bt
from .swapgen import compute_mappings, heavy_local_facilities

INF = float("inf")


@dataclass
class ClientProfile:
    client: int
    f1: int
    f2: int
    d1: float
    d2: float
    fstar: int
    dstar: float
    eta1: int
    eta2: int
    rho: float
    gstar: int       # nearest optimal facility to f1
    g: int | None    # nearest local to gstar excluding f1, f2
    closeness: str   # "far" | "close"
    letter: str      # "A".."E"


def classify(d1, d2, f1, f2, eta1, eta2, alpha):
    """(closeness, letter) per the taxonomy; far means d2 >= alpha*d1."""
    far = d2 >= alpha * d1 - 1e-12
    if far:
        if eta1 == f1:
            return "far", "A"
        if eta2 == f1:
            return "far", "B"
        return "far", "E"
    if f1 == eta1 and f2 != eta2:
        return "close", "A"
    if f1 == eta2 and f2 != eta1:
        return "close", "B"
    if f1 == eta1 and f2 == eta2:
        return "close", "C"
    if f1 == eta2 and f2 == eta1:
        return "close", "D"
    return "close", "E"


def build_profiles(pair, maps, params):
    """Profiles for every client of the analysis pair."""
    nL = pair.n_local
    lidx = np.arange(nL)
    oidx = np.arange(pair.n_opt)
    profiles = []
    for c in range(pair.n_clients):
        lorder = np.lexsort((lidx, pair.d_cl[c]))
        f1, f2 = int(lorder[0]), int(lorder[1])
        d1, d2 = float(pair.d_cl[c, f1]), float(pair.d_cl[c, f2])
        oorder = np.lexsort((oidx, pair.d_co[c]))
        fstar = int(oorder[0])
        dstar = float(pair.d_co[c, fstar])
        eta1, eta2 = int(maps.eta1[fstar]), int(maps.eta2[fstar])
        rho = float(maps.rho[fstar])
        gstar = int(maps.pi[f1])
        g = None
        if nL > 2:
            rest = [i for i in range(nL) if i not in (f1, f2)]
            g = min(rest, key=lambda i: (pair.d_lo[i, gstar], i))
        closeness, letter = classify(d1, d2, f1, f2, eta1, eta2, params.alpha)
        profiles.append(ClientProfile(c, f1, f2, d1, d2, fstar, dstar,
                                      eta1, eta2, rho, gstar, g, closeness, letter))
    return profiles


# ---------------------------------------------------------------------------
# exact potential-change accounting
# ---------------------------------------------------------------------------

def _phi(d1, d2, params):
    return d1 + params.beta * min(d2, params.alpha * d1)


def swap_deltas(pair, swap_set, params):
    """(n_swaps, n_clients) per-client potential change of each swap."""
    base = np.sort(pair.d_cl, axis=1)
    old1 = base[:, 0]
    old2 = base[:, 1] if pair.n_local > 1 else np.full_like(old1, INF)
    phi_old = old1 + params.beta * np.minimum(old2, params.alpha * old1)
    rows = []
    for swap in swap_set.swaps:
        alive = [i for i in range(pair.n_local) if i not in swap.closes]
        cols = [pair.d_cl[:, alive]] if alive else []
        if swap.opens:
            cols.append(pair.d_co[:, list(swap.opens)])
        cand = np.concatenate(cols, axis=1)
        if cand.shape[1] >= 2:
            part = np.partition(cand, 1, axis=1)
            new1, new2 = part[:, 0], part[:, 1]
        else:
            new1 = cand[:, 0]
            new2 = np.full_like(new1, INF)
        phi_new = new1 + params.beta * np.minimum(new2, params.alpha * new1)
        rows.append(phi_new - phi_old)
    return np.array(rows) if rows else np.zeros((0, pair.n_clients))


def client_delta_sum(pair, swap_set, params, client=None):
    """Sum over the swap set of the per-client potential change."""
    deltas = swap_deltas(pair, swap_set, params)
    totals = deltas.sum(axis=0) if len(deltas) else np.zeros(pair.n_clients)
    if client is None:
        return totals
    return float(totals[client])


# ---------------------------------------------------------------------------
# event detection
# ---------------------------------------------------------------------------

@dataclass
class EventTag:
    amenable: bool
    kind: str          # "simple" | "tree"
    tau_choice: str    # "eta1" | "eta2"
    sub_event: str     # "S1" | "S2" | "T1" | "T2"
    refinement: str | None = None   # "11" | "12" | "21" | "22" for close A/B
    causes: list = field(default_factory=list)


def _surrogate_pool(swap_set):
    pool = set(swap_set.local_surrogates.values())
    pool.update(l for _, l in swap_set.optimal_surrogates)
    return pool


def _merged_violation(swap_set, local_watch, opt_watch):
    """True when one balancing group joined two components that each hold a
    watched facility."""
    for grp in swap_set.merge_groups:
        if len(grp) < 2:
            continue
        holders = 0
        for cid in grp:
            lc, oc = swap_set.components[cid]
            if any(v[1] in local_watch for v in lc) or any(v[1] in opt_watch for v in oc):
                holders += 1
        if holders >= 2:
            return True
    return False


def detect_event(swap_set, profile):
    """Classify one generated swap set as amenable or defiant for a client."""
    p = profile
    tau_f = int(swap_set.tau[p.fstar])
    tau_choice = "eta1" if tau_f == p.eta1 else "eta2"
    sub = ("S" if swap_set.kind == "simple" else "T") + ("1" if tau_choice == "eta1" else "2")
    causes = []

    pool = _surrogate_pool(swap_set)
    if {p.f1, p.f2, tau_f} & pool:
        causes.append("i")
    if swap_set.kind == "tree":
        watched = {("O", p.fstar, 0), ("L", p.f1, 0), ("L", p.f2, 0)}
        if watched & swap_set.deleted_out_edges:
            causes.append("ii")
    else:
        if _merged_violation(swap_set, {p.f1, p.f2, p.eta1, p.eta2}, {p.fstar}):
            causes.append("iii")

    if p.letter in ("C", "D"):
        tau_g = int(swap_set.tau[p.gstar])
        if tau_g in pool:
            causes.append("i'")
        if swap_set.kind == "tree":
            if ("O", p.gstar, 0) in swap_set.deleted_out_edges:
                causes.append("ii'")
        else:
            watch = {p.f1} | ({p.g} if p.g is not None else set())
            if _merged_violation(swap_set, watch, set()):
                causes.append("iii'")

    refinement = None
    if swap_set.kind == "tree" and p.closeness == "close" and p.letter in ("A", "B"):
        refinement = _tree_refinement(swap_set, p, sub)
    return EventTag(amenable=not causes, kind=swap_set.kind, tau_choice=tau_choice,
                    sub_event=sub, refinement=refinement, causes=causes)


def _tree_refinement(swap_set, profile, sub):
    fstar_swap = swap_set.swap_opening_original(profile.fstar)
    closers = set(swap_set.swaps_closing(profile.f1)) | set(swap_set.swaps_closing(profile.f2))
    only_fstar = closers <= ({fstar_swap} if fstar_swap is not None else set())
    both_without = any(
        profile.f1 in s.closes and profile.f2 in s.closes and i != fstar_swap
        for i, s in enumerate(swap_set.swaps))
    if profile.letter == "A":
        t_one, t_two = only_fstar, both_without
    else:
        t_one, t_two = both_without, only_fstar
    if sub == "T1":
        return "11" if t_one else "12"
    return "21" if t_two else "22"


def check_amenability_implications(swap_set, profile, maps):
    """The structural consequences of amenability, as predicates."""
    p = profile
    tau_f = int(swap_set.tau[p.fstar])
    out = {}
    out["i"] = (len(swap_set.swaps_closing(p.f1)) <= 1
                and len(swap_set.swaps_closing(p.f2)) <= 1)
    orig = swap_set.swap_opening_original(p.fstar)
    out["ii"] = all(i == orig for i in swap_set.swaps_closing(tau_f))
    if swap_set.kind == "tree":
        ok = True
        for f in (p.f1, p.f2):
            pi_f = int(maps.pi[f])
            for i in swap_set.swaps_closing(f):
                sw = swap_set.swaps[i]
                if ("L", f, 0) in sw.local_copies:
                    ok = ok and (pi_f in sw.opens)
        out["Tii"] = ok
    else:
        watch = {p.f1, p.f2, p.eta1, p.eta2}
        out["Siii"] = all(len(watch & set(s.closes)) <= 1 for s in swap_set.swaps)
        out["Siv"] = all(
            p.fstar not in s.opens
            for s in swap_set.swaps
            if (set(s.closes) & ({p.f1, p.f2} - {tau_f})))
    return out


# ---------------------------------------------------------------------------
# per-sample bounds
# ---------------------------------------------------------------------------

def cd_subcase(pair, maps, profile, heavy):
    """Which neighborhood sub-case applies to a close C or D client.

    Returns (label, b) where b is meaningful for 'f' (which eta of g* is
    f2) and None otherwise.
    """
    p = profile
    if p.f1 in heavy:
        return "a", None
    if p.f2 in heavy:
        return "b", None
    if p.g is None:
        return "e", None
    d_g = pair.d_lo[p.g, p.gstar]
    d_f1 = pair.d_lo[p.f1, p.gstar]
    if d_g <= d_f1:
        return "c", None
    if p.gstar == p.fstar:
        return "e", None
    rho_g = float(maps.rho[p.gstar])
    e1g, e2g = int(maps.eta1[p.gstar]), int(maps.eta2[p.gstar])
    if rho_g <= 2 / 3:
        return ("c", None) if e1g == p.f1 else ("e", None)
    if p.f2 == e1g:
        return "f", 1
    if p.f2 == e2g:
        return "f", 2
    if rho_g > 3 / 4:
        return "d", None
    return "c", None


def sample_bound_rows(pair, maps, profile, swap_set, tag, params, heavy):
    """The applicable per-event bound rows for one amenable sample."""
    p = profile
    event = tag.sub_event
    if p.closeness == "far":
        coincide = False
        if event in ("T2", "T1"):
            orig = swap_set.swap_opening_original(p.fstar)
            closers = swap_set.swaps_closing(p.f1)
            coincide = bool(closers) and all(i == orig for i in closers)
        return bt.far_rows(p.letter, event, p.rho, params, coincide=coincide)
    if p.letter == "E":
        structure = "separate"
        if swap_set.kind == "tree":
            both = [i for i, s in enumerate(swap_set.swaps)
                    if p.f1 in s.closes and p.f2 in s.closes]
            if both:
                orig = swap_set.swap_opening_original(p.fstar)
                structure = "all" if orig in both else "pair"
        return bt.close_e_rows(event, params, structure)
    if p.letter == "A":
        return bt.close_a_rows(event, p.rho, params, subevent=tag.refinement)
    if p.letter == "B":
        return bt.close_b_rows(event, p.rho, params, subevent=tag.refinement)
    sub, b = cd_subcase(pair, maps, profile, heavy)
    kwargs = {}
    if sub == "d":
        tau_g = int(swap_set.tau[p.gstar])
        kwargs["gstar_b"] = 1 if tau_g == int(maps.eta1[p.gstar]) else 2
    if sub == "f":
        tau_g = int(swap_set.tau[p.gstar])
        eta_b = int(maps.eta1[p.gstar]) if b == 1 else int(maps.eta2[p.gstar])
        kwargs["tau_g_matches_b"] = (tau_g == eta_b) and swap_set.kind == "tree"
        kwargs["gstar_b"] = b
    fn = bt.close_c_rows if p.letter == "C" else bt.close_d_rows
    return fn(event, p.rho, params, sub, rho_gstar=float(maps.rho[p.gstar]), **kwargs)


# ---------------------------------------------------------------------------
# verification drivers
# ---------------------------------------------------------------------------

@dataclass
class BoundViolation:
    client: int
    kind: str          # "event-bound" | "crude" | "aggregate"
    detail: dict


@dataclass
class BoundsReport:
    n_samples: int
    n_clients: int
    violations: list
    aggregate_flags: list
    event_counts: dict          # client -> {sub_event: count}
    defiant_counts: dict        # client -> count
    worst_margin: float         # most negative slack seen (bound - realized)
    refinement_counts: dict

    @property
    def ok(self):
        return not self.violations


def verify_amenable_bounds(pair, samples, params, t_d, eps=1 / 3,
                           slack_k=5.0, tol=1e-6, maps=None, profiles=None):
    """Check every amenable sample against its boxed per-event bound, every
    sample against the crude bound, and per-client empirical means against
    the aggregate coefficients (with O(eps) slack; flagged, not fatal)."""
    maps = maps or compute_mappings(pair)
    profiles = profiles or build_profiles(pair, maps, params)
    heavy = heavy_local_facilities(pair, maps, t_d)
    violations = []
    flags = []
    event_counts = {p.client: {} for p in profiles}
    refinement_counts = {p.client: {} for p in profiles}
    defiant_counts = {p.client: 0 for p in profiles}
    amen_sums = {p.client: [] for p in profiles}
    worst = INF

    for s_idx, swap_set in enumerate(samples):
        deltas = swap_deltas(pair, swap_set, params).sum(axis=0)
        for p in profiles:
            realized = float(deltas[p.client])
            crude = bt.crude_bound(p.dstar, p.d1)
            if realized > crude + tol:
                violations.append(BoundViolation(p.client, "crude", {
                    "sample": s_idx, "realized": realized, "bound": crude}))
            tag = detect_event(swap_set, p)
            event_counts[p.client][tag.sub_event] = \
                event_counts[p.client].get(tag.sub_event, 0) + 1
            if tag.refinement:
                key = tag.sub_event[0] + tag.refinement
                refinement_counts[p.client][key] = \
                    refinement_counts[p.client].get(key, 0) + 1
            if not tag.amenable:
                defiant_counts[p.client] += 1
                continue
            rows = sample_bound_rows(pair, maps, p, swap_set, tag, params, heavy)
            bound = bt.evaluate_rows(rows, p.dstar, p.d1, p.d2)
            worst = min(worst, bound - realized)
            if realized > bound + tol:
                violations.append(BoundViolation(p.client, "event-bound", {
                    "sample": s_idx, "event": tag.sub_event,
                    "refinement": tag.refinement, "letter": p.letter,
                    "closeness": p.closeness, "realized": realized,
                    "bound": bound, "rows": rows,
                    "dstar": p.dstar, "d1": p.d1, "d2": p.d2, "rho": p.rho}))
            amen_sums[p.client].append(realized)

    n = len(samples)
    for p in profiles:
        if not amen_sums[p.client]:
            continue
        mean = float(np.mean(amen_sums[p.client]))
        cx, c1 = bt.AGGREGATE_COEFFS[(p.closeness, p.letter)]
        slack = slack_k * eps * (p.dstar + p.d1)
        limit = cx * p.dstar + c1 * p.d1 + slack
        if mean > limit:
            flags.append(BoundViolation(p.client, "aggregate", {
                "mean": mean, "limit": limit, "letter": p.letter,
                "closeness": p.closeness, "n_amenable": len(amen_sums[p.client])}))
    return BoundsReport(n_samples=n, n_clients=len(profiles),
                        violations=violations, aggregate_flags=flags,
                        event_counts=event_counts, defiant_counts=defiant_counts,
                        worst_margin=float(worst if worst < INF else 0.0),
                        refinement_counts=refinement_counts)


# ---------------------------------------------------------------------------
# the deterministic inequality suite
# ---------------------------------------------------------------------------

def inequality_suite(pair, maps=None, params=None, tol=1e-9, profiles=None):
    """Check every applicable triangle-derived inequality on every client.

    Returns a list of violation dicts (empty on success).
    """
    from .potential import PotentialParams
    params = params or PotentialParams()
    maps = maps or compute_mappings(pair)
    profiles = profiles or build_profiles(pair, maps, params)
    beta = params.beta
    bad = []

    def check(cond, name, lhs, rhs, p):
        if cond and lhs > rhs + tol:
            bad.append({"rule": name, "client": p.client, "lhs": lhs, "rhs": rhs,
                        "profile": (p.dstar, p.d1, p.d2, p.rho)})

    for p in profiles:
        ds, d1, d2, rho = p.dstar, p.d1, p.d2, p.rho
        d_eta1 = float(pair.d_cl[p.client, p.eta1])
        d_eta2 = float(pair.d_cl[p.client, p.eta2])
        d_pif1 = float(pair.d_co[p.client, int(maps.pi[p.f1])])
        d_pif2 = float(pair.d_co[p.client, int(maps.pi[p.f2])])
        a_is_f1 = p.eta1 == p.f1

        check(not a_is_f1, "d2<=2d*+d1", d2, 2 * ds + d1, p)
        check(True, "d(c,pi(f1))<=2d1+d*", d_pif1, 2 * d1 + ds, p)
        check(not a_is_f1, "max-eta<=2d*+d1", max(d_eta1, d_eta2), 2 * ds + d1, p)
        check(True, "best-balance", min(ds, d1) + beta * max(ds, d1),
              (1 - beta) * ds + 2 * beta * d1, p)
        if rho > tol:
            check(a_is_f1, "d2>=d1/rho-(1+1/rho)d*",
                  (1 / rho) * d1 - (1 + 1 / rho) * ds, d2, p)
            check(a_is_f1, "d2<=d*+(d1+d*)/rho", d2, ds + (d1 + ds) / rho, p)
            check(a_is_f1, "eta2<=d*+(d*+d1)/rho", d_eta2, ds + (ds + d1) / rho, p)
        check(not a_is_f1, "d2<=d*+rho(d1+d*)", d2, ds + rho * (d1 + ds), p)
        check(not a_is_f1, "eta1<=d*+rho(d*+d1)", d_eta1, ds + rho * (ds + d1), p)
        check(True, "d(c,pi(f2))<=2d2+d*", d_pif2, 2 * d2 + ds, p)
    return bad
