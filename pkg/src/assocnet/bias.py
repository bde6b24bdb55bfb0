"""The three bias-evaluation approaches over a normalized activation matrix.

stereotypes  paired differences of activation between the two members of
             each prime pair, read at two sets of stereotype targets; each
             set of differences goes through the Wilcoxon test. The first
             target set pairs with the first member of every prime pair:
             its differences are AL(first) - AL(second), and the second
             set's are AL(second) - AL(first), so positive values always
             mean "stereotype-consistent association is stronger".

valence      one univariate least-squares fit per prime (node valence on
             that prime's activation column) for the per-category
             coefficients, plus one multivariate fit of valence on all
             columns whose slope equality is tested with the Wald test.

emotions     per-emotion paired differences AL(first) - AL(second) over the
             emotion lexicon's target words present in the matrix, each set
             tested with the Wilcoxon test; positive effects mean the
             emotion binds more strongly to the first prime.

Targets or lexicon words missing from the matrix rows are excluded, with
coverage recorded in the report. Reports are plain dataclasses that
serialize deterministically (same inputs -> identical bytes).
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass

import numpy as np

from .activation import ActivationMatrix, RAW
from .errors import ComputeError, ValidationError
from .ingest import EMOTION_NAMES, Lexicon, PrimeSpec
from .stats import (
    TestResult,
    ols_fit,
    significance_stars,
    wald_equal_coefficients,
    wilcoxon_signed_rank,
)

logger = logging.getLogger(__name__)


def _paired_test(differences: np.ndarray) -> TestResult:
    """Wilcoxon on a difference set; an all-zero set is a null result.

    Perfectly symmetric activations are a legitimate outcome of the
    evaluation (effect 0, p 1) rather than an error, so the degenerate case
    is absorbed here instead of propagating `wilcoxon_signed_rank`'s
    complaint.
    """
    if differences.size and not np.any(differences):
        return TestResult(
            statistic=0.0,
            z_value=0.0,
            p_value=1.0,
            effect_size=0.0,
            n=0,
            method="wilcoxon-signed-rank/degenerate-zero",
        )
    return wilcoxon_signed_rank(differences)


@dataclass(frozen=True)
class PairedDifferenceSet:
    """A labeled vector of paired activation differences with provenance."""

    label: str
    differences: np.ndarray
    pair_provenance: tuple[tuple[tuple[str, str], str], ...]

    def __post_init__(self):
        if len(self.differences) != len(self.pair_provenance):
            raise ValidationError("difference vector and provenance lengths differ")


@dataclass(frozen=True)
class BiasReport:
    identity: str
    approach: str
    normalization: str
    results: tuple[tuple[str, TestResult], ...]
    coverage: dict
    coefficients: tuple[dict, ...] | None = None
    matrix_slice: dict | None = None
    difference_sets: tuple[PairedDifferenceSet, ...] = ()


def _require_normalized(m: ActivationMatrix, preferred: str, approach: str):
    if m.normalization == RAW:
        raise ComputeError(f"{approach}: matrix must be normalized first")
    if m.normalization != preferred:
        logger.warning(
            "%s: matrix normalized with %s (the usual choice is %s)",
            approach,
            m.normalization,
            preferred,
        )


def _present_targets(m: ActivationMatrix, words, set_label: str) -> list[str]:
    rows = m.row_index()
    present = [w for w in words if w in rows]
    missing = [w for w in words if w not in rows]
    if missing:
        logger.warning(
            "%s: %d target(s) not in the network, dropped: %s",
            set_label,
            len(missing),
            ", ".join(missing),
        )
    return present


def stereotype_bias(m: ActivationMatrix, spec: PrimeSpec) -> BiasReport:
    """Paired-difference stereotype evaluation plus heatmap slice."""
    _require_normalized(m, "l2_col_row", "stereotypes")
    if spec.approach != "stereotypes":
        raise ValidationError(f"spec approach is {spec.approach!r}, expected stereotypes")
    columns = {p: m.column(p) for p in spec.all_primes()}
    rows = m.row_index()

    set_names = list(spec.targets)
    present: dict[str, list[str]] = {}
    coverage: dict = {}
    for name in set_names:
        kept = _present_targets(m, spec.targets[name], f"{spec.identity}/{name}")
        if not kept:
            raise ComputeError(f"all targets of set {name!r} are missing from the network")
        present[name] = kept
        dropped = [w for w in spec.targets[name] if w not in rows]
        coverage[name] = {"used": len(kept), "missing": dropped}

    results = []
    diff_sets = []
    for side, name in enumerate(set_names):
        diffs = []
        provenance = []
        for pair in spec.prime_pairs:
            favored, other = (pair[0], pair[1]) if side == 0 else (pair[1], pair[0])
            for target in present[name]:
                t = rows[target]
                diffs.append(columns[favored][t] - columns[other][t])
                provenance.append((pair, target))
        diff_set = PairedDifferenceSet(
            label=f"{name}-targets",
            differences=np.array(diffs, dtype=np.float64),
            pair_provenance=tuple(provenance),
        )
        diff_sets.append(diff_set)
        results.append((diff_set.label, _paired_test(diff_set.differences)))

    slice_targets = [
        {"name": t, "set": name} for name in set_names for t in present[name]
    ]
    primes = list(spec.all_primes())
    slice_values = [
        [float(columns[p][rows[entry["name"]]]) for p in primes]
        for entry in slice_targets
    ]
    return BiasReport(
        identity=spec.identity,
        approach="stereotypes",
        normalization=m.normalization,
        results=tuple(results),
        coverage=coverage,
        matrix_slice={"primes": primes, "targets": slice_targets, "values": slice_values},
        difference_sets=tuple(diff_sets),
    )


def valence_bias(m: ActivationMatrix, spec: PrimeSpec, lex: Lexicon) -> BiasReport:
    """Per-prime valence coefficients and the equal-coefficients Wald test."""
    _require_normalized(m, "l2_col_row", "valence")
    if spec.approach != "valence":
        raise ValidationError(f"spec approach is {spec.approach!r}, expected valence")
    primes = spec.all_primes()
    columns = {p: m.column(p) for p in primes}

    rated = [(i, lex.valence[label]) for i, label in enumerate(m.node_labels) if label in lex.valence]
    if len(rated) < len(primes) + 2:
        raise ComputeError(
            f"valence: only {len(rated)} rated nodes; need at least {len(primes) + 2}"
        )
    rated_rows = np.array([i for i, _ in rated], dtype=np.int64)
    y = np.array([v for _, v in rated], dtype=np.float64)

    coefficients = []
    for p in primes:
        fit = ols_fit(y, columns[p][rated_rows], labels=[p])
        coefficients.append(
            {
                "prime": p,
                "coefficient": float(fit.coefficients[1]),
                "std_error": float(np.sqrt(fit.covariance[1, 1])),
            }
        )

    design = np.column_stack([columns[p][rated_rows] for p in primes])
    joint = ols_fit(y, design, labels=list(primes))
    wald = wald_equal_coefficients(joint, list(range(1, len(primes) + 1)))

    return BiasReport(
        identity=spec.identity,
        approach="valence",
        normalization=m.normalization,
        results=(("coefficients-equal", wald),),
        coverage={
            "rated_nodes": len(rated),
            "unrated_nodes": len(m.node_labels) - len(rated),
        },
        coefficients=tuple(coefficients),
    )


def emotion_bias(m: ActivationMatrix, spec: PrimeSpec, lex: Lexicon) -> BiasReport:
    """Per-emotion paired differences between the two primes of the pair."""
    _require_normalized(m, "l1_col_row", "emotions")
    if spec.approach != "emotions":
        raise ValidationError(f"spec approach is {spec.approach!r}, expected emotions")
    (first, second), = spec.prime_pairs
    col_first = m.column(first)
    col_second = m.column(second)
    rows = m.row_index()

    results = []
    diff_sets = []
    coverage = {}
    for emotion in EMOTION_NAMES:
        words = sorted(lex.emotions[emotion])
        present = [w for w in words if w in rows]
        if not present:
            raise ComputeError(f"no targets of emotion {emotion!r} are in the network")
        coverage[emotion] = {"used": len(present), "missing": len(words) - len(present)}
        diffs = np.array(
            [col_first[rows[w]] - col_second[rows[w]] for w in present], dtype=np.float64
        )
        diff_set = PairedDifferenceSet(
            label=emotion,
            differences=diffs,
            pair_provenance=tuple(((first, second), w) for w in present),
        )
        diff_sets.append(diff_set)
        results.append((emotion, _paired_test(diffs)))

    return BiasReport(
        identity=spec.identity,
        approach="emotions",
        normalization=m.normalization,
        results=tuple(results),
        coverage=coverage,
        difference_sets=tuple(diff_sets),
    )


def report_to_dict(report: BiasReport) -> dict:
    """JSON-ready dict with stable content (no volatile fields)."""
    doc = {
        "identity": report.identity,
        "approach": report.approach,
        "normalization": report.normalization,
        "results": [
            {
                "label": label,
                "statistic": r.statistic,
                "z_value": r.z_value,
                "p_value": r.p_value,
                "effect_size": r.effect_size,
                "n": r.n,
                "method": r.method,
                "stars": significance_stars(r.p_value),
            }
            for label, r in report.results
        ],
        "coverage": report.coverage,
    }
    if report.coefficients is not None:
        doc["coefficients"] = list(report.coefficients)
    if report.matrix_slice is not None:
        doc["matrix_slice"] = report.matrix_slice
    return doc


def report_json(report: BiasReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def heatmap_csv(report: BiasReport) -> str:
    """Long-format heatmap data: target,prime,value."""
    if report.matrix_slice is None:
        raise ValidationError("report has no matrix slice (not a stereotypes report)")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["target", "prime", "value"])
    ms = report.matrix_slice
    for entry, row in zip(ms["targets"], ms["values"]):
        for prime, value in zip(ms["primes"], row):
            writer.writerow([entry["name"], prime, f"{value:.17g}"])
    return out.getvalue()


def coefficients_csv(report: BiasReport) -> str:
    """Per-prime coefficient table: prime,coefficient,std_error."""
    if report.coefficients is None:
        raise ValidationError("report has no coefficient table (not a valence report)")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["prime", "coefficient", "std_error"])
    for row in report.coefficients:
        writer.writerow([row["prime"], f"{row['coefficient']:.17g}", f"{row['std_error']:.17g}"])
    return out.getvalue()
