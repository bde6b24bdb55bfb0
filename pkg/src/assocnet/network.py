"""Word-association network construction and structural statistics.

`build_network` applies a fixed filter pipeline to aggregated norm records:

  1. drop records whose cue or response is outside the vocabulary
  2. drop self-loop records (cue == response)
  3. undirect, keeping the larger weight of a bidirectional pair
  4. drop undirected edges with weight < min_weight
  5. keep the largest connected component (ties broken by the
     lexicographically smallest member node)

The resulting network is immutable: node labels are sorted and indexed
densely, the symmetric adjacency is stored in CSR form, and per-node
strengths (sums of incident weights) are precomputed for the diffusion step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComputeError, DataError, ValidationError


@dataclass(frozen=True)
class AssociationNetwork:
    """Undirected weighted word graph in CSR form.

    labels are sorted lexicographically and indexed 0..n-1; indptr/indices/
    weights hold the symmetric adjacency (each edge appears in both rows);
    strengths[i] is the sum of weights incident to node i.
    """

    labels: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    strengths: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size) // 2

    def index(self, word: str) -> int:
        idx = self._index_map().get(word)
        if idx is None:
            raise KeyError(word)
        return idx

    def __contains__(self, word: str) -> bool:
        return word in self._index_map()

    def _index_map(self) -> dict[str, int]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {label: i for i, label in enumerate(self.labels)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and edge weights of node i."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def edge_weight(self, i: int, j: int) -> int:
        nbrs, wts = self.neighbors(i)
        pos = np.searchsorted(nbrs, j)
        if pos < nbrs.size and nbrs[pos] == j:
            return int(wts[pos])
        return 0

    def edges(self):
        """Each undirected edge once, as (label_i, label_j, weight), sorted."""
        for i in range(self.node_count):
            nbrs, wts = self.neighbors(i)
            for j, w in zip(nbrs, wts):
                if i < j:
                    yield self.labels[i], self.labels[j], int(w)


def _network_from_edge_map(edge_map: dict[tuple[str, str], int]) -> AssociationNetwork:
    """Assemble the CSR structure from {(u, v): weight} with u != v."""
    labels = tuple(sorted({w for edge in edge_map for w in edge}))
    index = {label: i for i, label in enumerate(labels)}
    n = len(labels)
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (u, v), w in edge_map.items():
        ui, vi = index[u], index[v]
        adjacency[ui].append((vi, w))
        adjacency[vi].append((ui, w))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.empty(2 * len(edge_map), dtype=np.int64)
    weights = np.empty(2 * len(edge_map), dtype=np.float64)
    pos = 0
    for i in range(n):
        adjacency[i].sort()
        for j, w in adjacency[i]:
            indices[pos] = j
            weights[pos] = w
            pos += 1
        indptr[i + 1] = pos
    strengths = np.array(
        [weights[indptr[i] : indptr[i + 1]].sum() for i in range(n)], dtype=np.float64
    )
    return AssociationNetwork(
        labels=labels, indptr=indptr, indices=indices, weights=weights, strengths=strengths
    )


def bfs_distances(net: AssociationNetwork, source: int) -> np.ndarray:
    """Unweighted hop distances from source; -1 for unreachable nodes."""
    n = net.node_count
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    indptr, indices = net.indptr, net.indices
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        shift = np.repeat(np.cumsum(counts) - counts, counts)
        gather = np.arange(total, dtype=np.int64) - shift + np.repeat(starts, counts)
        neigh = indices[gather]
        fresh = neigh[dist[neigh] < 0]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        level += 1
        dist[frontier] = level
    return dist


def is_connected(net: AssociationNetwork) -> bool:
    return bool((bfs_distances(net, 0) >= 0).all())


def build_network(records, vocabulary=None, min_weight: int = 2) -> AssociationNetwork:
    """Build the filtered undirected network from aggregated records.

    vocabulary of None means no vocabulary filter. Records must be aggregated
    (unique (cue, response) keys); duplicates are rejected rather than merged.
    """
    if min_weight < 1:
        raise ValidationError(f"min_weight must be >= 1, got {min_weight}")

    directed: dict[tuple[str, str], int] = {}
    for rec in records:
        if vocabulary is not None and (rec.cue not in vocabulary or rec.response not in vocabulary):
            continue
        if rec.cue == rec.response:
            continue
        key = (rec.cue, rec.response)
        if key in directed:
            raise ValidationError(f"duplicate record for {key}; records must be aggregated")
        directed[key] = rec.count

    undirected: dict[tuple[str, str], int] = {}
    for (u, v), w in directed.items():
        key = (u, v) if u < v else (v, u)
        prev = undirected.get(key)
        if prev is None or w > prev:
            undirected[key] = w

    surviving = {e: w for e, w in undirected.items() if w >= min_weight}
    if not surviving:
        raise ComputeError("empty network: no edges survive filtering")

    full = _network_from_edge_map(surviving)
    component = _largest_component(full)
    if component.size < 2:
        raise ComputeError("empty network: largest component has fewer than 2 nodes")
    if component.size == full.node_count:
        return full

    keep = {full.labels[i] for i in component}
    kept_edges = {
        (u, v): w for (u, v), w in surviving.items() if u in keep and v in keep
    }
    return _network_from_edge_map(kept_edges)


def _largest_component(net: AssociationNetwork) -> np.ndarray:
    """Node indices of the largest component; ties -> smallest member label."""
    n = net.node_count
    seen = np.zeros(n, dtype=bool)
    best: np.ndarray | None = None
    for start in range(n):
        if seen[start]:
            continue
        dist = bfs_distances(net, start)
        members = np.flatnonzero(dist >= 0)
        seen[members] = True
        if best is None or members.size > best.size:
            # scanning starts in index order means ties keep the earlier
            # (lexicographically smaller) component
            best = members
    assert best is not None
    return best


def double_sweep_lower_bound(net: AssociationNetwork) -> tuple[int, int]:
    """(lower bound on diameter, index of a peripheral-ish midpoint node).

    BFS from the max-degree node, then BFS from the farthest node found; the
    distance reached by the second sweep is the bound. The midpoint of the
    found path seeds the exact search.
    """
    degrees = net.indptr[1:] - net.indptr[:-1]
    root = int(np.argmax(degrees))
    dist_r = bfs_distances(net, root)
    _check_reachable(dist_r)
    a = int(np.argmax(dist_r))
    dist_a = bfs_distances(net, a)
    b = int(np.argmax(dist_a))
    lb = int(dist_a[b])
    dist_b = bfs_distances(net, b)
    on_path = (dist_a + dist_b == lb) & (dist_a == lb // 2)
    mid = int(np.flatnonzero(on_path)[0]) if on_path.any() else a
    return lb, mid


def _check_reachable(dist: np.ndarray):
    if (dist < 0).any():
        raise ComputeError("network is disconnected; diameter is undefined")


def diameter(net: AssociationNetwork, method: str = "exact") -> int:
    """Diameter over the unweighted hop metric.

    "exact" runs a pruned eccentricity search seeded from a double sweep:
    process BFS-tree levels from the deepest inward, maintaining a lower
    bound from observed eccentricities and an upper bound of 2*(level-1);
    the bounds meet long before most nodes are visited on small-world
    graphs. "double_sweep_lower_bound" reports just the two-sweep bound.
    """
    if net.node_count < 2:
        return 0
    lb_sweep, mid = double_sweep_lower_bound(net)
    if method == "double_sweep_lower_bound":
        return lb_sweep

    if method != "exact":
        raise ValueError(f"unknown diameter method: {method!r}")

    dist_mid = bfs_distances(net, mid)
    _check_reachable(dist_mid)
    ecc_mid = int(dist_mid.max())
    lb = max(lb_sweep, ecc_mid)
    ub = 2 * ecc_mid
    level = ecc_mid
    order = np.argsort(dist_mid, kind="stable")
    level_starts = np.searchsorted(dist_mid[order], np.arange(ecc_mid + 2))
    while ub > lb and level >= 1:
        fringe = order[level_starts[level] : level_starts[level + 1]]
        level_best = 0
        for v in fringe:
            ecc_v = int(bfs_distances(net, int(v)).max())
            if ecc_v > level_best:
                level_best = ecc_v
        candidate = max(lb, level_best)
        if candidate > 2 * (level - 1):
            return candidate
        lb = candidate
        ub = 2 * (level - 1)
        level -= 1
    return lb


@dataclass(frozen=True)
class NetworkStats:
    node_count: int
    edge_count: int
    density: float
    average_degree: float
    diameter: int


def network_stats(net: AssociationNetwork, diameter_method: str = "exact") -> NetworkStats:
    """Structural statistics: counts, density, average degree, hop diameter."""
    n, e = net.node_count, net.edge_count
    return NetworkStats(
        node_count=n,
        edge_count=e,
        density=2.0 * e / (n * (n - 1)),
        average_degree=2.0 * e / n,
        diameter=diameter(net, method=diameter_method),
    )


def save_network(net: AssociationNetwork, path):
    """Serialize to canonical TSV: header comment, then sorted edges."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# node_count={net.node_count}\tedge_count={net.edge_count}\n")
        for u, v, w in net.edges():
            fh.write(f"{u}\t{v}\t{w}\n")


def load_network(path) -> AssociationNetwork:
    """Load a serialized network, checking header counts and connectivity."""
    edge_map: dict[tuple[str, str], int] = {}
    declared = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            row = line.rstrip("\n")
            if row.startswith("#"):
                declared = _parse_header(row)
                continue
            if row.strip() == "":
                continue
            cells = row.split("\t")
            if len(cells) != 3:
                raise DataError(f"expected 3 columns, got {len(cells)}", line=lineno)
            try:
                w = int(cells[2])
            except ValueError:
                raise DataError(f"weight is not an integer: {cells[2]!r}", line=lineno)
            u, v = cells[0], cells[1]
            if u == v:
                raise DataError(f"self-loop {u!r}", line=lineno)
            if w < 1:
                raise DataError(f"edge weight must be >= 1, got {w}", line=lineno)
            key = (u, v) if u < v else (v, u)
            if key in edge_map:
                raise DataError(f"duplicate edge {key}", line=lineno)
            edge_map[key] = w
    if not edge_map:
        raise DataError("network file contains no edges")
    net = _network_from_edge_map(edge_map)
    if declared is not None and declared != (net.node_count, net.edge_count):
        raise DataError(
            f"header declares nodes/edges {declared}, file contains "
            f"({net.node_count}, {net.edge_count})"
        )
    if not is_connected(net):
        raise DataError("serialized network is not connected")
    return net


def _parse_header(row: str):
    fields = dict(
        part.split("=", 1) for part in row.lstrip("#").strip().split("\t") if "=" in part
    )
    try:
        return int(fields["node_count"]), int(fields["edge_count"])
    except (KeyError, ValueError):
        raise DataError(f"malformed network header: {row!r}")
