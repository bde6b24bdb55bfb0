import json
import logging

import numpy as np
import pytest

from assocnet.activation import ActivationMatrix, normalize_matrix, spread_batch, SpreadParams
from assocnet.bias import (
    emotion_bias,
    heatmap_csv,
    coefficients_csv,
    report_json,
    stereotype_bias,
    valence_bias,
)
from assocnet.errors import ComputeError
from assocnet.ingest import EMOTION_NAMES, Lexicon, PrimeSpec

from conftest import random_connected_network


def make_matrix(node_labels, prime_labels, values, normalization="l2_col_row"):
    return ActivationMatrix(
        node_labels=tuple(node_labels),
        prime_labels=tuple(prime_labels),
        values=np.asarray(values, dtype=np.float64),
        normalization=normalization,
    )


def gender_spec(targets_f=("warm",), targets_m=("tough",), pairs=(("f", "mm"),)):
    return PrimeSpec(
        identity="gender",
        approach="stereotypes",
        prime_pairs=tuple(pairs),
        targets={"female": tuple(targets_f), "male": tuple(targets_m)},
    )


class TestStereotypes:
    def test_single_difference_arithmetic(self):
        m = make_matrix(
            ["warm", "tough", "f", "mm"],
            ["f", "mm"],
            [[0.8, 0.2], [0.1, 0.5], [0.9, 0.05], [0.02, 0.9]],
        )
        report = stereotype_bias(m, gender_spec())
        diffs = {s.label: s.differences for s in report.difference_sets}
        assert diffs["female-targets"] == pytest.approx([0.6])
        assert diffs["male-targets"] == pytest.approx([0.4])

    def test_consistent_offset_gives_positive_significant_effects(self, rng):
        pairs = [(f"f{i}", f"m{i}") for i in range(5)]
        targets_f = [f"tf{i}" for i in range(25)]
        targets_m = [f"tm{i}" for i in range(25)]
        nodes = targets_f + targets_m + [w for p in pairs for w in p]
        primes = [w for p in pairs for w in p]
        values = rng.random((len(nodes), len(primes))) * 0.01
        for t, target in enumerate(nodes):
            for k, prime in enumerate(primes):
                consistent = (target.startswith("tf") and prime.startswith("f")) or (
                    target.startswith("tm") and prime.startswith("m")
                )
                if consistent and target.startswith("t"):
                    values[t, k] += 0.1
        m = make_matrix(nodes, primes, values)
        spec = gender_spec(targets_f, targets_m, pairs)
        report = stereotype_bias(m, spec)
        for _, result in report.results:
            assert result.effect_size > 0
            assert result.p_value < 0.05
        assert report.results[0][1].n == 125

    def test_swapping_pair_order_flips_effect_signs(self, rng):
        nodes = ["warm", "cold", "f", "mm"]
        values = rng.random((4, 2)) + 0.05
        m = make_matrix(nodes, ["f", "mm"], values)
        spec = gender_spec(("warm",), ("cold",), (("f", "mm"),))
        swapped_m = make_matrix(nodes, ["mm", "f"], values[:, [1, 0]])
        swapped = PrimeSpec(
            identity="gender",
            approach="stereotypes",
            prime_pairs=(("mm", "f"),),
            targets={"female": ("warm",), "male": ("cold",)},
        )
        r1 = stereotype_bias(m, spec)
        r2 = stereotype_bias(swapped_m, swapped)
        for (_, a), (_, b) in zip(r1.results, r2.results):
            assert a.effect_size == pytest.approx(-b.effect_size)
            assert a.p_value == pytest.approx(b.p_value)

    def test_missing_target_dropped_with_warning(self, caplog):
        m = make_matrix(
            ["warm", "f", "mm"], ["f", "mm"], [[0.8, 0.2], [0.9, 0.1], [0.1, 0.9]]
        )
        spec = gender_spec(("warm", "ghost"), ("f",))
        with caplog.at_level(logging.WARNING):
            report = stereotype_bias(m, spec)
        assert "ghost" in caplog.text
        assert report.coverage["female"]["missing"] == ["ghost"]
        for dset in report.difference_sets:
            assert np.isfinite(dset.differences).all()

    def test_all_targets_missing_is_an_error(self):
        m = make_matrix(["f", "mm"], ["f", "mm"], [[0.9, 0.1], [0.1, 0.9]])
        with pytest.raises(ComputeError, match="all targets"):
            stereotype_bias(m, gender_spec(("ghost",), ("f",)))

    def test_missing_prime_column_is_an_error(self):
        m = make_matrix(["warm", "f"], ["f"], [[0.8], [0.9]])
        with pytest.raises(ComputeError, match="missing prime"):
            stereotype_bias(m, gender_spec())

    def test_raw_matrix_rejected(self):
        m = make_matrix(["warm", "f", "mm"], ["f", "mm"], np.ones((3, 2)), "raw")
        with pytest.raises(ComputeError, match="normalized"):
            stereotype_bias(m, gender_spec())

    def test_heatmap_slice_matches_matrix_values(self):
        m = make_matrix(
            ["warm", "tough", "f", "mm"],
            ["f", "mm"],
            [[0.8, 0.2], [0.1, 0.5], [0.9, 0.05], [0.02, 0.9]],
        )
        report = stereotype_bias(m, gender_spec())
        ms = report.matrix_slice
        assert ms["primes"] == ["f", "mm"]
        assert ms["targets"][0] == {"name": "warm", "set": "female"}
        assert ms["values"][0] == [0.8, 0.2]
        csv_text = heatmap_csv(report)
        assert csv_text.splitlines()[0] == "target,prime,value"
        assert "warm,f,0.8" in csv_text


class TestValence:
    def build_fixture(self, rng, n=60):
        col_a = rng.random(n) * 0.8 + 0.1
        col_b = rng.random(n) + 0.1
        col_c = rng.random(n) + 0.1
        nodes = [f"n{i}" for i in range(n)]
        valence = {node: float(col_a[i]) for i, node in enumerate(nodes)}
        lex = Lexicon(valence=valence, emotions={e: frozenset() for e in EMOTION_NAMES})
        m = make_matrix(nodes, ["a", "b", "c"], np.column_stack([col_a, col_b, col_c]))
        spec = PrimeSpec(identity="x", approach="valence", primes=("a", "b", "c"))
        return m, spec, lex

    def test_signal_column_recovers_unit_coefficient(self, rng):
        m, spec, lex = self.build_fixture(rng)
        report = valence_bias(m, spec, lex)
        coef = {c["prime"]: c["coefficient"] for c in report.coefficients}
        assert coef["a"] == pytest.approx(1.0, abs=1e-9)
        assert abs(coef["b"]) < 0.3
        wald = report.results[0][1]
        assert wald.p_value < 0.001
        assert report.results[0][0] == "coefficients-equal"

    def test_constant_valence_gives_null_result(self, rng):
        n = 40
        nodes = [f"n{i}" for i in range(n)]
        lex = Lexicon(
            valence={node: 0.5 for node in nodes},
            emotions={e: frozenset() for e in EMOTION_NAMES},
        )
        m = make_matrix(nodes, ["a", "b", "c"], rng.random((n, 3)))
        spec = PrimeSpec(identity="x", approach="valence", primes=("a", "b", "c"))
        report = valence_bias(m, spec, lex)
        for c in report.coefficients:
            assert c["coefficient"] == pytest.approx(0.0, abs=1e-9)
        wald = report.results[0][1]
        assert wald.statistic == 0.0
        assert wald.p_value == 1.0

    def test_unrated_nodes_excluded(self, rng):
        m, spec, lex = self.build_fixture(rng, n=30)
        partial = Lexicon(
            valence={k: v for k, v in list(lex.valence.items())[:20]},
            emotions=lex.emotions,
        )
        report = valence_bias(m, spec, partial)
        assert report.coverage == {"rated_nodes": 20, "unrated_nodes": 10}

    def test_too_few_rated_nodes(self, rng):
        m, spec, lex = self.build_fixture(rng, n=30)
        tiny = Lexicon(
            valence={k: v for k, v in list(lex.valence.items())[:4]},
            emotions=lex.emotions,
        )
        with pytest.raises(ComputeError, match="rated nodes"):
            valence_bias(m, spec, tiny)

    def test_slope_invariant_to_valence_shift(self, rng):
        # only the intercept should absorb a constant added to all ratings
        m, spec, lex = self.build_fixture(rng)
        shifted = Lexicon(
            valence={k: min(1.0, v * 0.5 + 0.2) for k, v in lex.valence.items()},
            emotions=lex.emotions,
        )
        base = {
            c["prime"]: c["coefficient"]
            for c in valence_bias(m, spec, lex).coefficients
        }
        moved = {
            c["prime"]: c["coefficient"]
            for c in valence_bias(m, spec, shifted).coefficients
        }
        for prime in base:
            assert moved[prime] == pytest.approx(0.5 * base[prime], rel=1e-9)

    def test_coefficients_csv_layout(self, rng):
        m, spec, lex = self.build_fixture(rng)
        report = valence_bias(m, spec, lex)
        lines = coefficients_csv(report).splitlines()
        assert lines[0] == "prime,coefficient,std_error"
        assert len(lines) == 4


def emotion_lexicon(**sets):
    emotions = {e: frozenset() for e in EMOTION_NAMES}
    emotions.update({k: frozenset(v) for k, v in sets.items()})
    return Lexicon(valence={}, emotions=emotions)


def political_spec():
    return PrimeSpec(
        identity="political", approach="emotions", prime_pairs=(("dem", "rep"),)
    )


class TestEmotions:
    def build_matrix(self, rng, words, tilt):
        """tilt[word] > 0 means the word leans toward the first prime."""
        nodes = list(words) + ["dem", "rep"]
        values = rng.random((len(nodes), 2)) * 0.01 + 0.2
        for i, w in enumerate(words):
            values[i, 0] += max(tilt[w], 0.0)
            values[i, 1] += max(-tilt[w], 0.0)
        return make_matrix(nodes, ["dem", "rep"], values, "l1_col_row")

    def test_sign_convention(self, rng):
        words = ["rage", "fury", "hate"]
        # all emotion words lean toward the second prime -> negative effects
        lex = emotion_lexicon(**{e: words for e in EMOTION_NAMES})
        m = self.build_matrix(rng, words, {w: -0.3 for w in words})
        report = emotion_bias(m, political_spec(), lex)
        anger = dict(report.results)["anger"]
        assert anger.effect_size < 0

    def test_symmetric_activations_are_null_not_errors(self):
        words = ["rage", "hope"]
        lex = emotion_lexicon(
            **{e: words for e in EMOTION_NAMES}
        )
        nodes = words + ["dem", "rep"]
        values = np.array([[0.3, 0.3], [0.2, 0.2], [0.9, 0.1], [0.1, 0.9]])
        m = make_matrix(nodes, ["dem", "rep"], values, "l1_col_row")
        report = emotion_bias(m, political_spec(), lex)
        for _, result in report.results:
            assert result.effect_size == 0.0
            assert result.p_value == 1.0

    def test_all_eight_emotions_reported_in_order(self, rng):
        words = ["w1", "w2", "w3"]
        lex = emotion_lexicon(**{e: words for e in EMOTION_NAMES})
        m = self.build_matrix(rng, words, {"w1": 0.2, "w2": -0.1, "w3": 0.05})
        report = emotion_bias(m, political_spec(), lex)
        assert tuple(label for label, _ in report.results) == EMOTION_NAMES

    def test_empty_intersection_names_emotion(self, rng):
        lex = emotion_lexicon(anger=["missingword"])
        m = self.build_matrix(rng, ["other"], {"other": 0.1})
        with pytest.raises(ComputeError, match="anger"):
            emotion_bias(m, political_spec(), lex)

    def test_coverage_counts(self, rng):
        words = ["w1", "w2"]
        lex = emotion_lexicon(**{e: words + ["ghost"] for e in EMOTION_NAMES})
        m = self.build_matrix(rng, words, {"w1": 0.2, "w2": -0.1})
        report = emotion_bias(m, political_spec(), lex)
        assert report.coverage["anger"] == {"used": 2, "missing": 1}


class TestReportSerialization:
    def test_reports_are_byte_identical_across_runs(self, rng):
        net = random_connected_network(rng, 18, 24, max_weight=9)
        spec = PrimeSpec(
            identity="toy",
            approach="stereotypes",
            prime_pairs=((net.labels[0], net.labels[1]),),
            targets={"one": (net.labels[2], net.labels[3]), "two": (net.labels[4],)},
        )
        params = SpreadParams(0.5, 4, float(net.node_count))

        def run():
            matrix = spread_batch(net, spec.all_primes(), params)
            return report_json(stereotype_bias(normalize_matrix(matrix, "l2"), spec))

        assert run() == run()

    def test_json_round_trips(self, rng):
        m = make_matrix(
            ["warm", "f", "mm"], ["f", "mm"], [[0.8, 0.2], [0.9, 0.1], [0.1, 0.9]]
        )
        report = stereotype_bias(m, gender_spec(("warm",), ("f",)))
        doc = json.loads(report_json(report))
        assert doc["identity"] == "gender"
        assert doc["approach"] == "stereotypes"
        assert {r["label"] for r in doc["results"]} == {"female-targets", "male-targets"}
        assert all("stars" in r for r in doc["results"])
