"""Finite metric instances: loading, validation, nearest-facility queries.

An instance holds a point set split into disjoint client and facility
identifier spaces.  Co-located points (distance 0) are permitted; loaders
that read "every vertex is both client and facility" formats duplicate each
vertex into one client copy and one facility copy at mutual distance 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DIST_TOL = 1e-9


class InstanceFormatError(ValueError):
    """Malformed instance file; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MetricValidationError(ValueError):
    pass


@dataclass(frozen=True)
class MetricViolation:
    kind: str  # "symmetry" | "negative" | "diagonal" | "triangle"
    points: tuple
    amount: float


@dataclass
class ValidationReport:
    mode: str
    triples_tested: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


class MetricInstance:
    """Clients, facilities and a symmetric distance oracle over their union.

    Internally all points live on a single 0..n-1 index space; ``clients``
    and ``facilities`` are index arrays into it.  Distances are stored as a
    dense float64 matrix except for Euclidean sources, where rows are
    computed lazily from coordinates and the client x facility block is
    cached on first use.
    """

    def __init__(self, n_points, clients, facilities, *, matrix=None,
                 coords=None, labels=None, source="explicit-matrix", k_hint=None):
        if matrix is None and coords is None:
            raise ValueError("need a distance matrix or coordinates")
        self.n_points = int(n_points)
        self.clients = np.asarray(clients, dtype=np.intp)
        self.facilities = np.asarray(facilities, dtype=np.intp)
        if np.intersect1d(self.clients, self.facilities).size:
            raise MetricValidationError("client and facility index spaces overlap")
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=np.float64)
        self._coords = None if coords is None else np.asarray(coords, dtype=np.float64)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n_points)]
        self.source = source
        self.k_hint = k_hint  # p from OR-Library headers, when present
        self._cf_block = None
        if self._matrix is not None:
            self._validate_matrix()

    # -- construction helpers -------------------------------------------------

    def _validate_matrix(self):
        m = self._matrix
        if m.shape != (self.n_points, self.n_points):
            raise MetricValidationError(f"matrix shape {m.shape} != ({self.n_points}, {self.n_points})")
        if (m < -DIST_TOL).any():
            raise MetricValidationError("negative distances")
        if (np.abs(np.diag(m)) > DIST_TOL).any():
            raise MetricValidationError("nonzero diagonal")
        if (np.abs(m - m.T) > DIST_TOL).any():
            raise MetricValidationError("asymmetric distances")

    @property
    def n_clients(self):
        return len(self.clients)

    @property
    def n_facilities(self):
        return len(self.facilities)

    def dist(self, i, j):
        if self._matrix is not None:
            return float(self._matrix[i, j])
        return float(np.linalg.norm(self._coords[i] - self._coords[j]))

    def full_matrix(self):
        if self._matrix is None:
            d = self._coords[:, None, :] - self._coords[None, :, :]
            self._matrix = np.sqrt((d * d).sum(axis=2))
        return self._matrix

    def client_facility_distances(self):
        """(n_clients, n_facilities) distance block; cached."""
        if self._cf_block is None:
            if self._matrix is not None:
                self._cf_block = self._matrix[np.ix_(self.clients, self.facilities)].copy()
            else:
                a = self._coords[self.clients]
                b = self._coords[self.facilities]
                d = a[:, None, :] - b[None, :, :]
                self._cf_block = np.sqrt((d * d).sum(axis=2))
        return self._cf_block

    def facility_facility_distances(self):
        if self._matrix is not None:
            return self._matrix[np.ix_(self.facilities, self.facilities)]
        a = self._coords[self.facilities]
        d = a[:, None, :] - a[None, :, :]
        return np.sqrt((d * d).sum(axis=2))


def nearest_facilities(instance, client, facility_subset, j):
    """The ``j`` nearest facilities to a client within ``facility_subset``.

    ``client`` and the subset entries are positions into
    ``instance.clients`` / ``instance.facilities``.  Returns (position,
    distance) pairs ascending by distance, ties broken by ascending
    position so every downstream mapping has a deterministic base ordering.
    """
    subset = np.asarray(facility_subset, dtype=np.intp)
    if not (1 <= j <= subset.size):
        raise ValueError(f"j={j} outside 1..{subset.size}")
    block = instance.client_facility_distances()
    d = block[client, subset]
    order = np.lexsort((subset, d))  # distance first, index to break ties
    chosen = order[:j]
    return [(int(subset[i]), float(d[i])) for i in chosen]


def verify_metric(instance, mode="auto", trials=20000, seed=0, tol=DIST_TOL):
    """Check metric axioms; violations are report content, not errors.

    Exhaustive triangle check when the point count is at most 200 (or when
    forced), sampled otherwise.
    """
    m = instance.full_matrix()
    n = instance.n_points
    if mode == "auto":
        mode = "exhaustive" if n <= 200 else "sampled"
    report = ValidationReport(mode=mode, triples_tested=0)

    if (m < -tol).any():
        for i, j in zip(*np.where(m < -tol)):
            report.violations.append(MetricViolation("negative", (int(i), int(j)), float(m[i, j])))
    bad_diag = np.where(np.abs(np.diag(m)) > tol)[0]
    for i in bad_diag:
        report.violations.append(MetricViolation("diagonal", (int(i),), float(m[i, i])))
    asym = np.abs(m - m.T)
    if (asym > tol).any():
        for i, j in zip(*np.where(np.triu(asym, 1) > tol)):
            report.violations.append(MetricViolation("symmetry", (int(i), int(j)), float(asym[i, j])))

    if mode == "exhaustive":
        for k in range(n):
            viol = m - (m[:, [k]] + m[[k], :])
            np.fill_diagonal(viol, -1.0)
            viol[:, k] = -1.0
            viol[k, :] = -1.0
            report.triples_tested += n * n
            if (viol > tol).any():
                for i, j in zip(*np.where(viol > tol)):
                    report.violations.append(
                        MetricViolation("triangle", (int(i), int(k), int(j)), float(viol[i, j])))
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, n, size=(trials, 3))
        report.triples_tested = trials
        d_ij = m[idx[:, 0], idx[:, 2]]
        d_ik = m[idx[:, 0], idx[:, 1]]
        d_kj = m[idx[:, 1], idx[:, 2]]
        bad = np.where(d_ij > d_ik + d_kj + tol)[0]
        for b in bad:
            i, k, j = (int(v) for v in idx[b])
            report.violations.append(MetricViolation("triangle", (i, k, j), float(d_ij[b] - d_ik[b] - d_kj[b])))
    return report


def floyd_warshall(weights):
    """All-pairs shortest paths of a dense weighted adjacency matrix.

    ``inf`` marks absent edges; the diagonal is forced to zero.  Used both
    by the OR-Library loader and as the closure oracle in tests.
    """
    d = np.asarray(weights, dtype=np.float64).copy()
    np.fill_diagonal(d, 0.0)
    n = d.shape[0]
    for k in range(n):
        np.minimum(d, d[:, [k]] + d[[k], :], out=d)
    if np.isinf(d).any():
        raise MetricValidationError("graph is not connected; closure has infinite entries")
    return d


def _duplicate_all_points(base_matrix, labels, source, k_hint=None):
    """Every vertex becomes one client copy and one facility copy at distance 0."""
    n = base_matrix.shape[0]
    full = np.zeros((2 * n, 2 * n))
    full[:n, :n] = base_matrix
    full[:n, n:] = base_matrix
    full[n:, :n] = base_matrix
    full[n:, n:] = base_matrix
    lab = [f"c:{v}" for v in labels] + [f"f:{v}" for v in labels]
    return MetricInstance(2 * n, np.arange(n), np.arange(n, 2 * n),
                          matrix=full, labels=lab, source=source, k_hint=k_hint)


def load_dense_matrix(path_or_lines):
    """Format (a): first line ``n``, then n whitespace-separated rows.

    Each point serves as both client and facility via duplication.
    """
    lines = _read_lines(path_or_lines)
    if not lines:
        raise InstanceFormatError("empty file")
    try:
        n = int(lines[0][1].split()[0])
    except (ValueError, IndexError):
        raise InstanceFormatError("expected point count", line=lines[0][0])
    rows = []
    for lineno, text in lines[1:]:
        if not text.strip():
            continue
        try:
            row = [float(tok) for tok in text.split()]
        except ValueError:
            raise InstanceFormatError("non-numeric entry", line=lineno)
        rows.append((lineno, row))
    if len(rows) != n:
        raise InstanceFormatError(f"expected {n} rows, found {len(rows)}")
    for lineno, row in rows:
        if len(row) != n:
            raise InstanceFormatError(f"expected {n} entries", line=lineno)
    m = np.array([r for _, r in rows])
    if (m < -DIST_TOL).any():
        raise MetricValidationError("negative matrix entry")
    if (np.abs(m - m.T) > DIST_TOL).any():
        raise MetricValidationError("asymmetric matrix")
    return _duplicate_all_points(m, [str(i) for i in range(n)], "explicit-matrix")


def load_orlib_pmed(path_or_lines):
    """Format (b): OR-Library p-median; header ``n m p`` then m edges ``u v w``.

    Distances are the all-pairs shortest-path closure; every vertex is both
    client and facility.
    """
    lines = _read_lines(path_or_lines)
    if not lines:
        raise InstanceFormatError("empty file")
    head = lines[0][1].split()
    if len(head) != 3:
        raise InstanceFormatError("expected header 'n m p'", line=lines[0][0])
    try:
        n, m_edges, p = (int(tok) for tok in head)
    except ValueError:
        raise InstanceFormatError("non-integer header", line=lines[0][0])
    w = np.full((n, n), np.inf)
    seen = 0
    for lineno, text in lines[1:]:
        if not text.strip():
            continue
        toks = text.split()
        if len(toks) != 3:
            raise InstanceFormatError("expected edge 'u v w'", line=lineno)
        try:
            u, v = int(toks[0]) - 1, int(toks[1]) - 1
            weight = float(toks[2])
        except ValueError:
            raise InstanceFormatError("non-numeric edge", line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceFormatError("vertex id out of range", line=lineno)
        if weight < 0:
            raise MetricValidationError(f"negative edge weight at line {lineno}")
        w[u, v] = min(w[u, v], weight)
        w[v, u] = min(w[v, u], weight)
        seen += 1
    if seen != m_edges:
        raise InstanceFormatError(f"expected {m_edges} edges, found {seen}")
    closure = floyd_warshall(w)
    return _duplicate_all_points(closure, [str(i + 1) for i in range(n)],
                                 "shortest-path-graph", k_hint=p)


def load_euclidean_csv(path_or_lines):
    """Format (c): one point per line ``role,x1,...,xd``; role in {client, facility, both}."""
    lines = _read_lines(path_or_lines)
    coords, roles = [], []
    dim = None
    for lineno, text in lines:
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        toks = [t.strip() for t in text.split(",")]
        role = toks[0].lower()
        if role not in ("client", "facility", "both"):
            raise InstanceFormatError(f"unknown role {toks[0]!r}", line=lineno)
        try:
            xs = [float(t) for t in toks[1:]]
        except ValueError:
            raise InstanceFormatError("non-numeric coordinate", line=lineno)
        if not xs:
            raise InstanceFormatError("missing coordinates", line=lineno)
        if dim is None:
            dim = len(xs)
        elif len(xs) != dim:
            raise InstanceFormatError(f"expected {dim} coordinates", line=lineno)
        coords.append(xs)
        roles.append(role)
    if not coords:
        raise InstanceFormatError("no points")
    pts, clients, facilities, labels = [], [], [], []
    for i, (xs, role) in enumerate(zip(coords, roles)):
        if role in ("client", "both"):
            clients.append(len(pts))
            labels.append(f"c:{i}")
            pts.append(xs)
        if role in ("facility", "both"):
            facilities.append(len(pts))
            labels.append(f"f:{i}")
            pts.append(xs)
    return MetricInstance(len(pts), clients, facilities,
                          coords=np.array(pts), labels=labels, source="euclidean-points")


def load_instance(path):
    """Dispatch on extension: .csv -> Euclidean, .pmed/.orlib -> OR-Library, else dense matrix."""
    name = str(path).lower()
    if name.endswith(".csv"):
        return load_euclidean_csv(path)
    if name.endswith((".pmed", ".orlib", ".txt")) and _looks_like_orlib(path):
        return load_orlib_pmed(path)
    return load_dense_matrix(path)


def _looks_like_orlib(path):
    with open(path) as fh:
        first = fh.readline().split()
    return len(first) == 3


def _read_lines(path_or_lines):
    """Returns [(1-based line number, text), ...]."""
    if isinstance(path_or_lines, (list, tuple)):
        return [(i + 1, str(t)) for i, t in enumerate(path_or_lines)]
    with open(path_or_lines) as fh:
        return [(i + 1, line.rstrip("\n")) for i, line in enumerate(fh)]


def from_arrays(client_facility=None, *, matrix=None, clients=None, facilities=None,
                labels=None, source="explicit-matrix"):
    """Build an instance from an explicit full matrix and index sets (test helper)."""
    m = np.asarray(matrix, dtype=np.float64)
    return MetricInstance(m.shape[0], clients, facilities, matrix=m,
                          labels=labels, source=source)
