"""Prime-to-target path subgraphs with valence-colored DOT rendering.

Edge costs are exact rationals (1/weight in inverse_weight mode, 1 in unit
mode), so "same total cost" is a true equality rather than a float
comparison. All minimum-cost paths are found via Dijkstra with predecessor
sets; up to max_paths of them are enumerated in lexicographic node order and
their union forms the stream subgraph.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ComputeError
from .ingest import Lexicon
from .network import AssociationNetwork

COST_MODES = ("inverse_weight", "unit")


@dataclass(frozen=True)
class MindsetStream:
    prime: str
    target: str
    cost_mode: str
    min_cost: Fraction
    path_nodes: tuple[tuple[str, ...], ...]
    subgraph: tuple[tuple[str, str, int], ...]
    node_valence: dict[str, float]
    truncated: bool

    @property
    def hop_lengths(self) -> tuple[int, ...]:
        return tuple(len(p) - 1 for p in self.path_nodes)


def extract_stream(
    net: AssociationNetwork,
    prime: str,
    target: str,
    cost_mode: str = "inverse_weight",
    max_paths: int = 16,
    lex: Lexicon | None = None,
) -> MindsetStream:
    """All co-minimal prime->target paths (up to max_paths), with subgraph."""
    if cost_mode not in COST_MODES:
        raise ValueError(f"cost_mode must be one of {COST_MODES}, got {cost_mode!r}")
    if max_paths < 1:
        raise ValueError(f"max_paths must be >= 1, got {max_paths}")
    for word in (prime, target):
        if word not in net:
            raise ComputeError(f"missing node: {word!r} is not in the network")
    if prime == target:
        raise ComputeError(f"degenerate stream: prime and target are both {prime!r}")

    source = net.index(prime)
    sink = net.index(target)
    dist = _dijkstra(net, source, cost_mode)
    if dist[sink] is None:
        raise ComputeError(f"no path between {prime!r} and {target!r}")

    paths, truncated = _enumerate_paths(net, dist, source, sink, cost_mode, max_paths)
    edges = set()
    for path in paths:
        for a, b in zip(path, path[1:]):
            i, j = sorted((a, b))
            edges.add((net.labels[i], net.labels[j], net.edge_weight(i, j)))

    node_valence = {}
    if lex is not None:
        for path in paths:
            for node in path:
                label = net.labels[node]
                if label in lex.valence:
                    node_valence[label] = lex.valence[label]

    return MindsetStream(
        prime=prime,
        target=target,
        cost_mode=cost_mode,
        min_cost=dist[sink],
        path_nodes=tuple(tuple(net.labels[i] for i in path) for path in paths),
        subgraph=tuple(sorted(edges)),
        node_valence=node_valence,
        truncated=truncated,
    )


def _edge_cost(weight: float, cost_mode: str) -> Fraction:
    if cost_mode == "unit":
        return Fraction(1)
    return Fraction(1, int(weight))


def _dijkstra(net: AssociationNetwork, source: int, cost_mode: str):
    dist: list[Fraction | None] = [None] * net.node_count
    dist[source] = Fraction(0)
    heap = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d != dist[u]:
            continue
        nbrs, wts = net.neighbors(u)
        for v, w in zip(nbrs, wts):
            nd = d + _edge_cost(w, cost_mode)
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


def _enumerate_paths(net, dist, source, sink, cost_mode, max_paths):
    """DFS over the shortest-path DAG in lexicographic label order."""
    # tight edges out of u: those on some minimum-cost path continuing to v
    can_reach = _reaches_sink(net, dist, sink, cost_mode)
    paths = []
    stack = [(source, [source])]
    truncated = False
    while stack:
        u, path = stack.pop()
        if u == sink:
            paths.append(path)
            if len(paths) == max_paths:
                truncated = bool(stack)
                break
            continue
        nbrs, wts = net.neighbors(u)
        tight = [
            int(v)
            for v, w in zip(nbrs, wts)
            if can_reach[v] and dist[v] == dist[u] + _edge_cost(w, cost_mode)
        ]
        # reverse-sorted by label so the stack pops lexicographically first
        tight.sort(key=lambda v: net.labels[v], reverse=True)
        for v in tight:
            stack.append((v, path + [v]))
    return paths, truncated


def _reaches_sink(net, dist, sink, cost_mode):
    """Which nodes lie on some minimum-cost path that continues to the sink."""
    can = [False] * net.node_count
    can[sink] = True
    order = sorted(
        (i for i in range(net.node_count) if dist[i] is not None),
        key=lambda i: dist[i],
        reverse=True,
    )
    for u in order:
        if can[u]:
            continue
        nbrs, wts = net.neighbors(u)
        for v, w in zip(nbrs, wts):
            if dist[v] == dist[u] + _edge_cost(w, cost_mode) and can[v]:
                can[u] = True
                break
    return can


POSITIVE_THRESHOLD = 0.6
NEGATIVE_THRESHOLD = 0.4

_CLASS_COLORS = {
    "positive": "#9ecae1",
    "negative": "#fc9272",
    "neutral": "#d9d9d9",
}


def valence_class(valence: float | None) -> str:
    if valence is None:
        return "neutral"
    if valence >= POSITIVE_THRESHOLD:
        return "positive"
    if valence <= NEGATIVE_THRESHOLD:
        return "negative"
    return "neutral"


def _quote(word: str) -> str:
    return '"' + word.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(stream: MindsetStream, lex: Lexicon | None = None) -> str:
    """Deterministic DOT text for a stream; words colored by valence class."""
    valence = dict(stream.node_valence)
    if lex is not None:
        valence = {**{w: lex.valence[w] for w in _stream_nodes(stream) if w in lex.valence}, **valence}
    lines = [
        "graph mindset_stream {",
        "  graph [rankdir=LR];",
        "  node [style=filled];",
    ]
    for word in sorted(_stream_nodes(stream)):
        cls = valence_class(valence.get(word))
        attrs = [f'fillcolor="{_CLASS_COLORS[cls]}"', f'class="{cls}"']
        if word in (stream.prime, stream.target):
            attrs.append("penwidth=3")
            attrs.append("shape=box")
        lines.append(f"  {_quote(word)} [{', '.join(attrs)}];")
    for u, v, w in stream.subgraph:
        lines.append(f"  {_quote(u)} -- {_quote(v)} [label=\"{w}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _stream_nodes(stream: MindsetStream):
    return {node for path in stream.path_nodes for node in path}


def stream_to_dict(stream: MindsetStream) -> dict:
    """JSON-ready summary used as the sidecar next to the DOT file."""
    return {
        "prime": stream.prime,
        "target": stream.target,
        "cost_mode": stream.cost_mode,
        "min_cost": float(stream.min_cost),
        "min_cost_exact": str(stream.min_cost),
        "paths": [list(p) for p in stream.path_nodes],
        "hop_lengths": list(stream.hop_lengths),
        "edges": [[u, v, w] for u, v, w in stream.subgraph],
        "truncated": stream.truncated,
    }


def stream_json(stream: MindsetStream) -> str:
    return json.dumps(stream_to_dict(stream), indent=2, sort_keys=True) + "\n"
