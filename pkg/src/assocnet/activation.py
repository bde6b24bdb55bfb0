"""Spreading activation over an association network.

The update rule is a synchronous lazy walk with retention r and zero decay:

    a_j(t+1) = r * a_j(t) + sum_i (1 - r) * a_i(t) * w_ij / s_i

where w_ij is the edge weight and s_i the strength (weighted degree) of
node i. Total activation is conserved exactly (up to float rounding): what a
node does not retain is split among its neighbors proportionally to edge
weights. The prime starts with the full initial activation and every other
node at zero; after the configured number of steps the vector is read out.

Per-prime vectors are assembled column-wise into an activation matrix which
can then be normalized column-first, row-second with either the L1 or the
L2 norm.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .errors import ComputeError, DataError, ValidationError
from .network import AssociationNetwork

RAW = "raw"
NORM_TAGS = {"l1": "l1_col_row", "l2": "l2_col_row"}


@dataclass(frozen=True)
class SpreadParams:
    """Diffusion parameters.

    Defaults mirror the standard setup: retention 0.5, steps twice the
    network diameter, initial activation equal to the node count; the two
    network-dependent values are resolved by `SpreadParams.resolve`.
    """

    retention: float
    steps: int
    initial_activation: float

    def __post_init__(self):
        if not 0.0 <= self.retention <= 1.0:
            raise ValidationError(f"retention must be in [0, 1], got {self.retention}")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        if not self.initial_activation > 0:
            raise ValidationError(
                f"initial_activation must be positive, got {self.initial_activation}"
            )

    @classmethod
    def resolve(
        cls,
        net: AssociationNetwork,
        network_diameter: int,
        retention: float | None = None,
        steps: int | None = None,
        initial_activation: float | None = None,
    ) -> "SpreadParams":
        return cls(
            retention=0.5 if retention is None else retention,
            steps=2 * network_diameter if steps is None else steps,
            initial_activation=(
                float(net.node_count) if initial_activation is None else initial_activation
            ),
        )


@dataclass(frozen=True)
class ActivationMatrix:
    """Final activation levels: rows are network nodes, columns are primes."""

    node_labels: tuple[str, ...]
    prime_labels: tuple[str, ...]
    values: np.ndarray
    normalization: str = RAW

    def __post_init__(self):
        if self.values.shape != (len(self.node_labels), len(self.prime_labels)):
            raise ValidationError(
                f"matrix shape {self.values.shape} does not match "
                f"{len(self.node_labels)} nodes x {len(self.prime_labels)} primes"
            )
        if len(set(self.node_labels)) != len(self.node_labels):
            raise ValidationError("node labels contain duplicates")

    def column(self, prime: str) -> np.ndarray:
        hits = [k for k, label in enumerate(self.prime_labels) if label == prime]
        if not hits:
            raise ComputeError(f"missing prime: {prime!r} is not a matrix column")
        if len(hits) > 1:
            raise ComputeError(f"ambiguous prime: {prime!r} appears in several columns")
        return self.values[:, hits[0]]

    def row_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.node_labels)}


def _transition(net: AssociationNetwork) -> sparse.csr_matrix:
    n = net.node_count
    return sparse.csr_matrix((net.weights, net.indices, net.indptr), shape=(n, n))


def spread(net: AssociationNetwork, prime: str, params: SpreadParams) -> np.ndarray:
    """Final activation vector after diffusing from a single prime node."""
    if prime not in net:
        raise ComputeError(f"missing prime: {prime!r} is not a node of the network")
    w = _transition(net)
    a = np.zeros(net.node_count, dtype=np.float64)
    a[net.index(prime)] = params.initial_activation
    return _iterate(w, net.strengths, a, params)


def _iterate(w, strengths, a, params):
    r = params.retention
    for _ in range(params.steps):
        a = r * a + (1.0 - r) * (w @ (a / strengths))
    return a


def spread_batch(
    net: AssociationNetwork, primes, params: SpreadParams
) -> ActivationMatrix:
    """One diffusion per prime, assembled into a raw activation matrix.

    All primes are checked before any diffusion starts; a failure reports
    every missing prime at once. Columns are computed independently, so the
    result does not depend on evaluation order (duplicate primes simply
    yield identical columns).
    """
    primes = tuple(primes)
    missing = sorted({p for p in primes if p not in net})
    if missing:
        raise ComputeError(f"missing primes: {', '.join(missing)}")
    w = _transition(net)
    columns = []
    for prime in primes:
        a = np.zeros(net.node_count, dtype=np.float64)
        a[net.index(prime)] = params.initial_activation
        columns.append(_iterate(w, net.strengths, a, params))
    values = np.column_stack(columns) if columns else np.zeros((net.node_count, 0))
    return ActivationMatrix(
        node_labels=net.labels,
        prime_labels=primes,
        values=values,
        normalization=RAW,
    )


def normalize_matrix(m: ActivationMatrix, norm: str) -> ActivationMatrix:
    """Column-then-row normalization with the L1 or L2 norm.

    Each column is divided by its norm, then each row of the column-
    normalized matrix is divided by its norm. All-zero rows or columns are
    left as zeros instead of propagating NaNs.
    """
    if m.normalization != RAW:
        raise ComputeError(
            f"matrix is already normalized ({m.normalization}); refusing to re-normalize"
        )
    if norm not in NORM_TAGS:
        raise ValueError(f"norm must be 'l1' or 'l2', got {norm!r}")
    values = m.values.astype(np.float64, copy=True)
    col = _norms(values, norm, axis=0)
    nonzero = col > 0
    values[:, nonzero] /= col[nonzero]
    row = _norms(values, norm, axis=1)
    nonzero = row > 0
    values[nonzero, :] /= row[nonzero, None]
    return replace(m, values=values, normalization=NORM_TAGS[norm])


def _norms(values: np.ndarray, norm: str, axis: int) -> np.ndarray:
    if norm == "l1":
        return np.abs(values).sum(axis=axis)
    return np.sqrt((values * values).sum(axis=axis))


def save_matrix(m: ActivationMatrix, path, sidecar_path, params: dict | None = None):
    """Write the matrix as TSV (17 significant digits) plus a JSON sidecar."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node\t" + "\t".join(m.prime_labels) + "\n")
        for i, label in enumerate(m.node_labels):
            cells = "\t".join(f"{v:.17g}" for v in m.values[i])
            fh.write(f"{label}\t{cells}\n")
    sidecar = {
        "normalization": m.normalization,
        "prime_labels": list(m.prime_labels),
        "node_count": len(m.node_labels),
    }
    if params:
        sidecar["params"] = params
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_matrix(path, sidecar_path) -> tuple[ActivationMatrix, dict]:
    """Inverse of `save_matrix`; values round-trip exactly."""
    import json

    with open(sidecar_path, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[0] != "node":
            raise DataError("matrix file must start with a 'node' header row", line=1)
        primes = tuple(header[1:])
        labels = []
        rows = []
        for lineno, line in enumerate(fh, 2):
            cells = line.rstrip("\n").split("\t")
            if len(cells) != len(primes) + 1:
                raise DataError(
                    f"expected {len(primes) + 1} columns, got {len(cells)}", line=lineno
                )
            labels.append(cells[0])
            rows.append([float(c) for c in cells[1:]])
    values = np.array(rows, dtype=np.float64).reshape(len(labels), len(primes))
    matrix = ActivationMatrix(
        node_labels=tuple(labels),
        prime_labels=primes,
        values=values,
        normalization=sidecar.get("normalization", RAW),
    )
    return matrix, sidecar
