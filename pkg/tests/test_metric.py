import numpy as np
import pytest

from kmedlab.metric import (
    InstanceFormatError, MetricValidationError, floyd_warshall,
    load_dense_matrix, load_euclidean_csv, load_orlib_pmed,
    nearest_facilities, verify_metric, from_arrays,
)


def test_dense_matrix_path_metric():
    inst = load_dense_matrix(["3", "0 1 2", "1 0 1", "2 1 0"])
    assert inst.n_clients == 3 and inst.n_facilities == 3
    # duplicated copies are co-located
    assert inst.dist(inst.clients[0], inst.facilities[0]) == 0.0
    assert inst.dist(inst.clients[0], inst.facilities[2]) == 2.0
    assert verify_metric(inst).ok


def test_dense_matrix_rejects_asymmetry():
    with pytest.raises(MetricValidationError):
        load_dense_matrix(["2", "0 1", "2 0"])


def test_dense_matrix_reports_line_numbers():
    with pytest.raises(InstanceFormatError) as ei:
        load_dense_matrix(["2", "0 x", "1 0"])
    assert "line 2" in str(ei.value)


def test_orlib_shortest_path_closure():
    # 4-cycle with one heavy chord; closure must match Floyd-Warshall directly
    lines = ["4 5 2", "1 2 3", "2 3 4", "3 4 5", "4 1 6", "1 3 10"]
    inst = load_orlib_pmed(lines)
    assert inst.k_hint == 2
    w = np.full((4, 4), np.inf)
    for u, v, c in [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 0, 6), (0, 2, 10)]:
        w[u, v] = w[v, u] = c
    d = floyd_warshall(w)
    got = np.array([[inst.dist(inst.clients[i], inst.facilities[j]) for j in range(4)]
                    for i in range(4)])
    assert np.allclose(got, d)
    assert d[0, 2] == 7.0  # through vertex 2, not the chord
    assert verify_metric(inst).ok


def test_euclidean_unit_square():
    rows = ["client,0,0", "client,1,1", "facility,1,0", "both,0,1"]
    inst = load_euclidean_csv(rows)
    assert inst.n_clients == 3 and inst.n_facilities == 2
    # corner to opposite corner
    assert inst.dist(inst.clients[0], inst.clients[1]) == pytest.approx(np.sqrt(2))
    assert verify_metric(inst).ok


def test_nearest_facilities_basic_and_ties():
    # client at 0; facilities at 1 and 3 on a line
    m = np.array([
        [0, 1, 3],
        [1, 0, 2],
        [3, 2, 0],
    ], dtype=float)
    inst = from_arrays(matrix=m, clients=[0], facilities=[1, 2])
    got = nearest_facilities(inst, 0, [0, 1], 2)
    assert got == [(0, 1.0), (1, 3.0)]
    # ties broken by ascending facility position
    m2 = np.array([
        [0, 1, 1],
        [1, 0, 2],
        [1, 2, 0],
    ], dtype=float)
    inst2 = from_arrays(matrix=m2, clients=[0], facilities=[1, 2])
    assert nearest_facilities(inst2, 0, [0, 1], 1) == [(0, 1.0)]
    with pytest.raises(ValueError):
        nearest_facilities(inst2, 0, [0, 1], 3)


def test_nearest_matches_full_sort_oracle():
    rng = np.random.default_rng(7)
    pts = rng.uniform(size=(11, 2))
    from kmedlab.metric import MetricInstance
    inst = MetricInstance(11, [0], list(range(1, 11)), coords=pts)
    got = nearest_facilities(inst, 0, list(range(10)), 3)
    dists = sorted((np.linalg.norm(pts[0] - pts[f + 1]), f) for f in range(10))
    assert [f for f, _ in got] == [f for _, f in dists[:3]]


def test_verify_metric_detects_forced_violation():
    m = np.array([
        [0, 1, 5],
        [1, 0, 1],
        [5, 1, 0],
    ], dtype=float)
    inst = from_arrays(matrix=m, clients=[0], facilities=[1, 2])
    rep = verify_metric(inst, mode="exhaustive")
    assert not rep.ok
    kinds = {v.kind for v in rep.violations}
    assert kinds == {"triangle"}


def test_permutation_property():
    rng = np.random.default_rng(3)
    pts = rng.uniform(size=(9, 3))
    from kmedlab.metric import MetricInstance
    inst = MetricInstance(9, [0, 1], list(range(2, 9)), coords=pts)
    facs = list(range(7))
    got = nearest_facilities(inst, 0, facs, len(facs))
    assert sorted(f for f, _ in got) == facs
    ds = [d for _, d in got]
    assert all(a <= b + 1e-12 for a, b in zip(ds, ds[1:]))
