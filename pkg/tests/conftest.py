import numpy as np
import pytest

from assocnet.network import AssociationNetwork, _network_from_edge_map


def label_for(i: int) -> str:
    return f"w{i:03d}"


def network_from_edges(edges) -> AssociationNetwork:
    """Build a network directly from (u, v, weight) triples (test backdoor)."""
    return _network_from_edge_map(
        {(min(u, v), max(u, v)): w for u, v, w in edges}
    )


def random_connected_network(rng: np.random.Generator, n: int, extra_edges: int,
                             max_weight: int = 20) -> AssociationNetwork:
    """Random spanning tree plus extra edges, integer weights in 1..max_weight."""
    edges = {}
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges[(label_for(j), label_for(i))] = int(rng.integers(1, max_weight + 1))
    for _ in range(extra_edges):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        key = (label_for(min(i, j)), label_for(max(i, j)))
        edges.setdefault(key, int(rng.integers(1, max_weight + 1)))
    return _network_from_edge_map(edges)


def dense_random_network(rng: np.random.Generator, n: int, p: float = 0.85,
                         low: int = 5, high: int = 15) -> AssociationNetwork:
    """Dense weighted graph (fast-mixing, hop diameter 2 for moderate n)."""
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(label_for(i), label_for(j))] = int(rng.integers(low, high + 1))
    for i in range(1, n):
        edges.setdefault((label_for(0), label_for(i)), int(rng.integers(low, high + 1)))
    return _network_from_edge_map(edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
