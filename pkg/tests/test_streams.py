from fractions import Fraction

import pytest

from assocnet.errors import ComputeError
from assocnet.ingest import EMOTION_NAMES, Lexicon
from assocnet.streams import extract_stream, render_dot, stream_json, valence_class

from conftest import network_from_edges, random_connected_network


def square_net():
    return network_from_edges(
        [("a", "b", 10), ("b", "d", 10), ("a", "c", 1), ("c", "d", 1)]
    )


def brute_force_minimal_paths(net, prime, target, cost_mode):
    """Enumerate every simple path by DFS and keep the cheapest ones."""
    adjacency = {}
    for u, v, w in net.edges():
        cost = Fraction(1) if cost_mode == "unit" else Fraction(1, w)
        adjacency.setdefault(u, []).append((v, cost))
        adjacency.setdefault(v, []).append((u, cost))
    found = []

    def walk(node, path, cost):
        if node == target:
            found.append((cost, tuple(path)))
            return
        for nbr, c in adjacency.get(node, []):
            if nbr not in path:
                walk(nbr, path + [nbr], cost + c)

    walk(prime, [prime], Fraction(0))
    best = min(cost for cost, _ in found)
    return best, {p for cost, p in found if cost == best}


class TestExtract:
    def test_inverse_weight_prefers_strong_edges(self):
        stream = extract_stream(square_net(), "a", "d", "inverse_weight", max_paths=8)
        assert stream.path_nodes == (("a", "b", "d"),)
        assert stream.min_cost == Fraction(1, 5)

    def test_unit_mode_finds_both_co_minimal_paths(self):
        stream = extract_stream(square_net(), "a", "d", "unit", max_paths=8)
        assert stream.path_nodes == (("a", "b", "d"), ("a", "c", "d"))
        assert stream.hop_lengths == (2, 2)
        assert not stream.truncated

    def test_unique_path_in_both_modes(self):
        net = network_from_edges([("a", "b", 2), ("b", "c", 3)])
        for mode in ("inverse_weight", "unit"):
            stream = extract_stream(net, "a", "c", mode)
            assert stream.path_nodes == (("a", "b", "c"),)

    def test_subgraph_is_union_of_path_edges(self):
        stream = extract_stream(square_net(), "a", "d", "unit", max_paths=8)
        assert stream.subgraph == (
            ("a", "b", 10),
            ("a", "c", 1),
            ("b", "d", 10),
            ("c", "d", 1),
        )

    def test_truncation_respects_max_paths_without_changing_cost(self):
        full = extract_stream(square_net(), "a", "d", "unit", max_paths=8)
        cut = extract_stream(square_net(), "a", "d", "unit", max_paths=1)
        assert cut.min_cost == full.min_cost
        assert len(cut.path_nodes) == 1
        assert cut.truncated

    def test_direction_symmetry_of_edge_sets(self, rng):
        for _ in range(10):
            net = random_connected_network(rng, 12, 14, max_weight=6)
            a, b = net.labels[0], net.labels[-1]
            fwd = extract_stream(net, a, b, "inverse_weight", max_paths=512)
            rev = extract_stream(net, b, a, "inverse_weight", max_paths=512)
            assert set(fwd.subgraph) == set(rev.subgraph)

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(15):
            net = random_connected_network(rng, 8, 8, max_weight=5)
            prime, target = net.labels[0], net.labels[-1]
            for mode in ("inverse_weight", "unit"):
                stream = extract_stream(net, prime, target, mode, max_paths=4096)
                cost, paths = brute_force_minimal_paths(net, prime, target, mode)
                assert stream.min_cost == cost
                assert set(stream.path_nodes) == paths

    def test_lexicographic_enumeration_order(self):
        net = network_from_edges(
            [("s", "b", 1), ("s", "a", 1), ("a", "t", 1), ("b", "t", 1)]
        )
        stream = extract_stream(net, "s", "t", "unit", max_paths=8)
        assert stream.path_nodes == (("s", "a", "t"), ("s", "b", "t"))

    def test_degenerate_stream_rejected(self):
        with pytest.raises(ComputeError, match="degenerate"):
            extract_stream(square_net(), "a", "a")

    def test_missing_node_rejected(self):
        with pytest.raises(ComputeError, match="missing node"):
            extract_stream(square_net(), "a", "zzz")


class TestRenderDot:
    def lexicon(self, valence):
        return Lexicon(valence=valence, emotions={e: frozenset() for e in EMOTION_NAMES})

    def test_valence_classes(self):
        assert valence_class(0.9) == "positive"
        assert valence_class(0.6) == "positive"
        assert valence_class(0.5) == "neutral"
        assert valence_class(0.4) == "negative"
        assert valence_class(None) == "neutral"

    def test_threshold_application_in_dot(self):
        net = network_from_edges([("a", "b", 2), ("b", "c", 3)])
        lex = self.lexicon({"a": 0.9, "b": 0.5, "c": 0.1})
        stream = extract_stream(net, "a", "c", lex=lex)
        dot = render_dot(stream)
        assert '"a" [fillcolor="#9ecae1", class="positive"' in dot
        assert '"b" [fillcolor="#d9d9d9", class="neutral"' in dot
        assert '"c" [fillcolor="#fc9272", class="negative"' in dot

    def test_unrated_word_is_neutral(self):
        net = network_from_edges([("a", "b", 2)])
        stream = extract_stream(net, "a", "b", lex=self.lexicon({}))
        assert 'class="neutral"' in render_dot(stream)

    def test_prime_and_target_are_marked(self):
        net = network_from_edges([("a", "b", 2), ("b", "c", 3)])
        stream = extract_stream(net, "a", "c")
        dot = render_dot(stream)
        assert dot.count("penwidth=3") == 2

    def test_identical_inputs_render_identical_bytes(self):
        net = network_from_edges([("a", "b", 2), ("b", "c", 3)])
        lex = self.lexicon({"a": 0.7})
        one = render_dot(extract_stream(net, "a", "c", lex=lex))
        two = render_dot(extract_stream(net, "a", "c", lex=lex))
        assert one == two

    def test_edge_labels_carry_weights(self):
        net = network_from_edges([("a", "b", 7)])
        dot = render_dot(extract_stream(net, "a", "b"))
        assert '"a" -- "b" [label="7"]' in dot

    def test_json_sidecar_contents(self):
        stream = extract_stream(square_net(), "a", "d", "inverse_weight")
        import json

        doc = json.loads(stream_json(stream))
        assert doc["min_cost_exact"] == "1/5"
        assert doc["paths"] == [["a", "b", "d"]]
        assert doc["hop_lengths"] == [2]
