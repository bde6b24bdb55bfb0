"""End-to-end run orchestration: ingest -> build -> spread -> evaluate.

A run is driven by a JSON config (paths are resolved relative to the config
file) and writes a deterministic artifact tree:

    network/network.tsv          canonical edge list
    network/stats.json           node/edge counts, density, degree, diameter
    matrices/<identity>.raw.tsv  one raw activation matrix per identity
    matrices/<identity>.raw.json sidecar with resolved diffusion params
    matrices/<identity>.<tag>.tsv(.json)   normalized variants
    reports/<identity>.<tag>.report.json   bias report per identity
    reports/<identity>.<tag>.heatmap.csv   stereotype heatmap data
    reports/<identity>.<tag>.coefficients.csv  valence coefficient table
    streams/<prime>--<target>.<mode>.dot(.json) mindset streams

Artifacts contain no timestamps; two runs over identical inputs produce
byte-identical trees. Run metadata (log, lock, cache manifest) lives in the
hidden .runmeta/ directory, which is not part of the artifact tree. Stages
write into a temporary area and their files are promoted only when the whole
run succeeds. Caching is keyed by content hashes of the stage inputs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import activation, bias, network, streams
from .errors import AssocnetError, ComputeError, ConfigError
from .ingest import (
    Lexicon,
    PrimeSpec,
    load_lexicons,
    load_prime_spec,
    load_vocabulary,
    normalize_token,
    parse_trials,
)

logger = logging.getLogger(__name__)

DEFAULT_NORMS = {"stereotypes": "l2", "valence": "l2", "emotions": "l1"}
_APPROACH_EVAL = {
    "stereotypes": lambda m, spec, lex: bias.stereotype_bias(m, spec),
    "valence": bias.valence_bias,
    "emotions": bias.emotion_bias,
}


@dataclass
class StreamRequest:
    prime: str
    target: str
    cost_mode: str = "inverse_weight"
    max_paths: int = 16


@dataclass
class RunConfig:
    """Validated run configuration with absolute paths."""

    norms: Path
    norms_format: str
    output_dir: Path
    vocabulary: Path | None = None
    valence_lexicon: Path | None = None
    emotion_lexicon: Path | None = None
    prime_specs: list[Path] = field(default_factory=list)
    min_weight: int = 2
    retention: float | None = None
    steps: int | None = None
    initial_activation: float | None = None
    norms_by_approach: dict = field(default_factory=lambda: dict(DEFAULT_NORMS))
    streams: list[StreamRequest] = field(default_factory=list)
    cache: bool = True


_CONFIG_KEYS = {
    "norms",
    "norms_format",
    "vocabulary",
    "valence_lexicon",
    "emotion_lexicon",
    "prime_specs",
    "min_weight",
    "retention",
    "steps",
    "initial_activation",
    "norms_by_approach",
    "streams",
    "output_dir",
    "cache",
}


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Load and validate the run config; `overrides` come from CLI flags."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})

    base = path.parent

    def resolve(key, required=False):
        value = doc.get(key)
        if value is None:
            if required:
                raise ConfigError(f"config field {key!r} is required")
            return None
        p = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
        if not p.exists():
            raise ConfigError(f"{key}: path does not exist: {p}")
        return p

    norms_format = doc.get("norms_format", "aggregated")
    if norms_format not in ("trial", "aggregated"):
        raise ConfigError(f"norms_format must be 'trial' or 'aggregated', got {norms_format!r}")

    raw_out = doc.get("output_dir", "out")
    out_dir = (base / raw_out).resolve() if not Path(raw_out).is_absolute() else Path(raw_out)

    norm_choice = dict(DEFAULT_NORMS)
    for approach, norm in (doc.get("norms_by_approach") or {}).items():
        if approach not in DEFAULT_NORMS:
            raise ConfigError(f"norms_by_approach: unknown approach {approach!r}")
        if norm not in ("l1", "l2"):
            raise ConfigError(f"norms_by_approach: norm must be 'l1' or 'l2', got {norm!r}")
        norm_choice[approach] = norm

    stream_requests = []
    for item in doc.get("streams") or []:
        if not isinstance(item, dict) or "prime" not in item or "target" not in item:
            raise ConfigError(f"stream request needs prime and target: {item!r}")
        mode = item.get("cost_mode", "inverse_weight")
        if mode not in streams.COST_MODES:
            raise ConfigError(f"stream cost_mode must be one of {streams.COST_MODES}")
        stream_requests.append(
            StreamRequest(
                prime=normalize_token(str(item["prime"])),
                target=normalize_token(str(item["target"])),
                cost_mode=mode,
                max_paths=int(item.get("max_paths", 16)),
            )
        )

    config = RunConfig(
        norms=resolve("norms", required=True),
        norms_format=norms_format,
        output_dir=out_dir,
        vocabulary=resolve("vocabulary"),
        valence_lexicon=resolve("valence_lexicon"),
        emotion_lexicon=resolve("emotion_lexicon"),
        prime_specs=[
            _resolve_existing(base, p, "prime_specs") for p in doc.get("prime_specs", [])
        ],
        min_weight=int(doc.get("min_weight", 2)),
        retention=_opt_float(doc, "retention"),
        steps=_opt_int(doc, "steps"),
        initial_activation=_opt_float(doc, "initial_activation"),
        norms_by_approach=norm_choice,
        streams=stream_requests,
        cache=bool(doc.get("cache", True)),
    )
    _validate_config(config)
    return config


def _resolve_existing(base: Path, value, what: str) -> Path:
    p = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
    if not p.exists():
        raise ConfigError(f"{what}: path does not exist: {p}")
    return p


def _opt_float(doc, key):
    return None if doc.get(key) is None else float(doc[key])


def _opt_int(doc, key):
    return None if doc.get(key) is None else int(doc[key])


def _validate_config(config: RunConfig):
    if config.min_weight < 1:
        raise ConfigError(f"min_weight must be >= 1, got {config.min_weight}")
    specs = [_load_spec(p) for p in config.prime_specs]
    approaches = {s.approach for s in specs}
    if "valence" in approaches and config.valence_lexicon is None:
        raise ConfigError("a valence prime spec requires the valence_lexicon field")
    if "emotions" in approaches and config.emotion_lexicon is None:
        raise ConfigError("an emotions prime spec requires the emotion_lexicon field")
    if len({s.identity for s in specs}) != len(specs):
        raise ConfigError("prime specs must have distinct identities")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(config.output_dir, os.W_OK):
        raise ConfigError(f"output directory is not writable: {config.output_dir}")


def _load_spec(path: Path) -> PrimeSpec:
    with open(path, encoding="utf-8") as fh:
        return load_prime_spec(fh)


def _load_lexicon(config: RunConfig) -> Lexicon:
    valence_src = (
        config.valence_lexicon.read_text(encoding="utf-8").splitlines(keepends=True)
        if config.valence_lexicon
        else []
    )
    emotion_src = (
        config.emotion_lexicon.read_text(encoding="utf-8").splitlines(keepends=True)
        if config.emotion_lexicon
        else []
    )
    return load_lexicons(iter(valence_src), iter(emotion_src))


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, Path):
            h.update(part.read_bytes())
        elif isinstance(part, bytes):
            h.update(part)
        else:
            h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


class _Run:
    """Shared machinery for full runs and single-stage subcommands."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = config.output_dir
        self.meta_dir = self.out / ".runmeta"
        self.tmp_dir = self.meta_dir / "tmp"
        self.manifest_path = self.meta_dir / "cache.json"
        self.meta_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = {}
        if config.cache and self.manifest_path.exists():
            try:
                self.manifest = json.loads(self.manifest_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                self.manifest = {}
        self.staged: list[tuple[Path, Path]] = []
        self.log_lines: list[str] = []
        self._lock_handle = None

    # -- locking ---------------------------------------------------------
    def __enter__(self):
        lock = self.meta_dir / "lock"
        try:
            self._lock_handle = open(lock, "x")
        except FileExistsError:
            raise ConfigError(
                f"output directory is locked by another run: {lock} (remove if stale)"
            )
        self._lock_handle.write(str(os.getpid()))
        self._lock_handle.flush()
        if self.tmp_dir.exists():
            shutil.rmtree(self.tmp_dir)
        self.tmp_dir.mkdir(parents=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if self.tmp_dir.exists():
            shutil.rmtree(self.tmp_dir, ignore_errors=True)
        if self._lock_handle is not None:
            self._lock_handle.close()
            (self.meta_dir / "lock").unlink(missing_ok=True)
        self._flush_log()
        return False

    def _flush_log(self):
        if self.log_lines:
            with open(self.meta_dir / "run.log", "a", encoding="utf-8") as fh:
                fh.writelines(line + "\n" for line in self.log_lines)
            self.log_lines = []

    def log(self, message: str):
        self.log_lines.append(f"{time.strftime('%Y-%m-%dT%H:%M:%S')} {message}")

    # -- staging ---------------------------------------------------------
    def stage_file(self, relative: str, text: str):
        tmp = self.tmp_dir / relative
        tmp.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(text, encoding="utf-8")
        self.staged.append((tmp, self.out / relative))

    def artifact_path(self, relative: str) -> Path:
        """The staged copy of an artifact when present, else the promoted one."""
        for tmp, final in self.staged:
            if final == self.out / relative:
                return tmp
        return self.out / relative

    def promote(self):
        for tmp, final in self.staged:
            final.parent.mkdir(parents=True, exist_ok=True)
            os.replace(tmp, final)
        self.staged = []
        self.manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def cached(self, stage: str, key: str, artifacts: list[str]) -> bool:
        if not self.config.cache:
            return False
        entry = self.manifest.get(stage)
        if entry != key:
            return False
        return all((self.out / rel).exists() for rel in artifacts)

    def record(self, stage: str, key: str):
        self.manifest[stage] = key


def _stage_tag(stage):
    def wrap(exc: AssocnetError) -> AssocnetError:
        exc.args = (f"[stage:{stage}] {exc.args[0]}",) + exc.args[1:]
        return exc

    return wrap


def build_stage(run: _Run) -> tuple[network.AssociationNetwork, network.NetworkStats]:
    """Parse norms, build the network, compute stats; artifacts network/*."""
    config = run.config
    key = _digest(
        "build",
        config.norms,
        config.norms_format,
        config.vocabulary or "no-vocabulary",
        config.min_weight,
    )
    net_rel, stats_rel = "network/network.tsv", "network/stats.json"
    if run.cached("build", key, [net_rel, stats_rel]):
        run.log("build: cache hit")
        net = network.load_network(run.out / net_rel)
        stats = _stats_from_json(run.out / stats_rel)
        return net, stats
    started = time.monotonic()
    try:
        with open(config.norms, encoding="utf-8") as fh:
            records = parse_trials(fh, format=config.norms_format)
        vocabulary = None
        if config.vocabulary is not None:
            with open(config.vocabulary, encoding="utf-8") as fh:
                vocabulary = load_vocabulary(fh)
        net = network.build_network(records, vocabulary=vocabulary, min_weight=config.min_weight)
        stats = network.network_stats(net)
    except AssocnetError as exc:
        raise _stage_tag("build")(exc)
    run.stage_file(net_rel, _network_text(net))
    run.stage_file(stats_rel, _stats_json(stats))
    run.record("build", key)
    run.log(f"build: {stats.node_count} nodes, {stats.edge_count} edges, "
            f"diameter {stats.diameter} ({time.monotonic() - started:.2f}s)")
    return net, stats


def _network_text(net: network.AssociationNetwork) -> str:
    lines = [f"# node_count={net.node_count}\tedge_count={net.edge_count}"]
    lines.extend(f"{u}\t{v}\t{w}" for u, v, w in net.edges())
    return "\n".join(lines) + "\n"


def _stats_json(stats: network.NetworkStats) -> str:
    doc = {
        "node_count": stats.node_count,
        "edge_count": stats.edge_count,
        "density": stats.density,
        "average_degree": stats.average_degree,
        "diameter": stats.diameter,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _stats_from_json(path: Path) -> network.NetworkStats:
    doc = json.loads(path.read_text(encoding="utf-8"))
    return network.NetworkStats(**doc)


def _matrix_text(m: activation.ActivationMatrix) -> str:
    lines = ["node\t" + "\t".join(m.prime_labels)]
    for i, label in enumerate(m.node_labels):
        lines.append(label + "\t" + "\t".join(f"{v:.17g}" for v in m.values[i]))
    return "\n".join(lines) + "\n"


def _sidecar_text(m: activation.ActivationMatrix, params: dict) -> str:
    doc = {
        "normalization": m.normalization,
        "prime_labels": list(m.prime_labels),
        "node_count": len(m.node_labels),
        "params": params,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def spread_stage(
    run: _Run,
    net: network.AssociationNetwork,
    stats: network.NetworkStats,
    specs: list[PrimeSpec],
) -> dict[str, activation.ActivationMatrix]:
    """One raw activation matrix per identity; artifacts matrices/*.raw.*"""
    config = run.config
    params = activation.SpreadParams.resolve(
        net,
        stats.diameter,
        retention=config.retention,
        steps=config.steps,
        initial_activation=config.initial_activation,
    )
    sidecar_params = {
        "retention": params.retention,
        "steps": params.steps,
        "initial_activation": params.initial_activation,
        "network_diameter": stats.diameter,
    }
    matrices = {}
    for spec in specs:
        rel = f"matrices/{spec.identity}.raw"
        key = _digest(
            "spread", run.artifact_path("network/network.tsv"),
            json.dumps(sidecar_params, sort_keys=True),
            ",".join(spec.all_primes()),
        )
        if run.cached(f"spread:{spec.identity}", key, [rel + ".tsv", rel + ".json"]):
            run.log(f"spread[{spec.identity}]: cache hit")
            matrix, _ = activation.load_matrix(run.out / (rel + ".tsv"), run.out / (rel + ".json"))
            matrices[spec.identity] = matrix
            continue
        started = time.monotonic()
        try:
            matrix = activation.spread_batch(net, spec.all_primes(), params)
        except AssocnetError as exc:
            raise _stage_tag("spread")(exc)
        run.stage_file(rel + ".tsv", _matrix_text(matrix))
        run.stage_file(rel + ".json", _sidecar_text(matrix, sidecar_params))
        run.record(f"spread:{spec.identity}", key)
        run.log(f"spread[{spec.identity}]: {len(spec.all_primes())} primes "
                f"({time.monotonic() - started:.2f}s)")
        matrices[spec.identity] = matrix
    return matrices


def spread_adhoc(
    run: _Run,
    net: network.AssociationNetwork,
    stats: network.NetworkStats,
    matrix_id: str,
    primes: list[str],
):
    """Diffusion for an explicit prime list, stored under a caller-chosen id."""
    config = run.config
    params = activation.SpreadParams.resolve(
        net,
        stats.diameter,
        retention=config.retention,
        steps=config.steps,
        initial_activation=config.initial_activation,
    )
    sidecar_params = {
        "retention": params.retention,
        "steps": params.steps,
        "initial_activation": params.initial_activation,
        "network_diameter": stats.diameter,
    }
    rel = f"matrices/{matrix_id}.raw"
    key = _digest(
        "spread", run.artifact_path("network/network.tsv"),
        json.dumps(sidecar_params, sort_keys=True), ",".join(primes),
    )
    if run.cached(f"spread:{matrix_id}", key, [rel + ".tsv", rel + ".json"]):
        run.log(f"spread[{matrix_id}]: cache hit")
        return
    try:
        matrix = activation.spread_batch(net, primes, params)
    except AssocnetError as exc:
        raise _stage_tag("spread")(exc)
    run.stage_file(rel + ".tsv", _matrix_text(matrix))
    run.stage_file(rel + ".json", _sidecar_text(matrix, sidecar_params))
    run.record(f"spread:{matrix_id}", key)
    run.log(f"spread[{matrix_id}]: {len(primes)} primes")


def normalize_stage(run: _Run, matrix_id: str, norm: str):
    """Column-then-row normalize a stored raw matrix."""
    raw_rel = f"matrices/{matrix_id}.raw"
    tsv, sidecar = run.out / (raw_rel + ".tsv"), run.out / (raw_rel + ".json")
    if not tsv.exists() or not sidecar.exists():
        raise ComputeError(
            f"[stage:normalize] raw matrix {matrix_id!r} missing; run 'spread' first"
        )
    tag = activation.NORM_TAGS[norm]
    rel = f"matrices/{matrix_id}.{tag}"
    key = _digest("normalize", tsv, norm)
    if run.cached(f"normalize:{matrix_id}:{tag}", key, [rel + ".tsv", rel + ".json"]):
        run.log(f"normalize[{matrix_id}/{tag}]: cache hit")
        return
    matrix, _ = activation.load_matrix(tsv, sidecar)
    try:
        normalized = activation.normalize_matrix(matrix, norm)
    except AssocnetError as exc:
        raise _stage_tag("normalize")(exc)
    run.stage_file(rel + ".tsv", _matrix_text(normalized))
    run.stage_file(rel + ".json", _sidecar_text(normalized, {"norm": norm}))
    run.record(f"normalize:{matrix_id}:{tag}", key)
    run.log(f"normalize[{matrix_id}/{tag}]: done")


def bias_stage(
    run: _Run,
    specs: list[PrimeSpec],
    matrices: dict[str, activation.ActivationMatrix],
    lex: Lexicon,
    norm_override: str | None = None,
) -> dict[str, bias.BiasReport]:
    """Normalize each identity's matrix and evaluate its bias approach."""
    config = run.config
    reports = {}
    for spec in specs:
        norm = norm_override or config.norms_by_approach[spec.approach]
        tag = activation.NORM_TAGS[norm]
        raw_rel = f"matrices/{spec.identity}.raw"
        norm_rel = f"matrices/{spec.identity}.{tag}"
        report_rel = f"reports/{spec.identity}.{tag}.report.json"
        extras = []
        if spec.approach == "stereotypes":
            extras.append(f"reports/{spec.identity}.{tag}.heatmap.csv")
        if spec.approach == "valence":
            extras.append(f"reports/{spec.identity}.{tag}.coefficients.csv")
        key = _digest(
            "bias",
            run.artifact_path(raw_rel + ".tsv"),
            norm,
            _spec_fingerprint(spec),
            config.valence_lexicon or "no-valence",
            config.emotion_lexicon or "no-emotions",
        )
        stage_name = f"bias:{spec.identity}:{tag}"
        if run.cached(stage_name, key, [report_rel, norm_rel + ".tsv"] + extras):
            run.log(f"bias[{spec.identity}/{tag}]: cache hit")
            reports[spec.identity] = _report_from_file(run.out / report_rel, spec)
            continue
        raw = matrices[spec.identity]
        try:
            normalized = activation.normalize_matrix(raw, norm)
            report = _APPROACH_EVAL[spec.approach](normalized, spec, lex)
        except AssocnetError as exc:
            raise _stage_tag("bias")(exc)
        run.stage_file(norm_rel + ".tsv", _matrix_text(normalized))
        run.stage_file(norm_rel + ".json", _sidecar_text(normalized, {"norm": norm}))
        run.stage_file(report_rel, bias.report_json(report))
        if spec.approach == "stereotypes":
            run.stage_file(extras[0], bias.heatmap_csv(report))
        if spec.approach == "valence":
            run.stage_file(extras[0], bias.coefficients_csv(report))
        run.record(stage_name, key)
        run.log(f"bias[{spec.identity}/{tag}]: done")
        reports[spec.identity] = report
    return reports


def _spec_fingerprint(spec: PrimeSpec) -> str:
    return json.dumps(
        {
            "identity": spec.identity,
            "approach": spec.approach,
            "prime_pairs": spec.prime_pairs,
            "primes": spec.primes,
            "targets": {k: list(v) for k, v in spec.targets.items()},
        },
        sort_keys=True,
    )


def _report_from_file(path: Path, spec: PrimeSpec) -> bias.BiasReport:
    doc = json.loads(path.read_text(encoding="utf-8"))
    results = tuple(
        (
            entry["label"],
            bias.TestResult(
                statistic=entry["statistic"],
                z_value=entry["z_value"],
                p_value=entry["p_value"],
                effect_size=entry["effect_size"],
                n=entry["n"],
                method=entry["method"],
            ),
        )
        for entry in doc["results"]
    )
    return bias.BiasReport(
        identity=doc["identity"],
        approach=doc["approach"],
        normalization=doc["normalization"],
        results=results,
        coverage=doc["coverage"],
        coefficients=tuple(doc["coefficients"]) if "coefficients" in doc else None,
        matrix_slice=doc.get("matrix_slice"),
    )


def stream_stage(
    run: _Run, net: network.AssociationNetwork, lex: Lexicon, requests: list[StreamRequest]
):
    """Extract each requested mindset stream; artifacts streams/*."""
    for req in requests:
        rel = f"streams/{req.prime}--{req.target}.{req.cost_mode}"
        key = _digest(
            "stream", run.artifact_path("network/network.tsv"),
            req.prime, req.target, req.cost_mode, req.max_paths,
            run.config.valence_lexicon or "no-valence",
        )
        stage_name = f"stream:{req.prime}--{req.target}:{req.cost_mode}"
        if run.cached(stage_name, key, [rel + ".dot", rel + ".json"]):
            run.log(f"stream[{req.prime}->{req.target}]: cache hit")
            continue
        try:
            stream = streams.extract_stream(
                net, req.prime, req.target, cost_mode=req.cost_mode,
                max_paths=req.max_paths, lex=lex,
            )
        except AssocnetError as exc:
            raise _stage_tag("stream")(exc)
        run.stage_file(rel + ".dot", streams.render_dot(stream))
        run.stage_file(rel + ".json", streams.stream_json(stream))
        run.record(stage_name, key)
        run.log(f"stream[{req.prime}->{req.target}]: {len(stream.path_nodes)} path(s)")


def run_pipeline(config: RunConfig, norm_override: str | None = None) -> dict:
    """Full pipeline; returns a summary dict of artifact paths."""
    specs = [_load_spec(p) for p in config.prime_specs]
    with _Run(config) as run:
        net, stats = build_stage(run)
        matrices = spread_stage(run, net, stats, specs)
        lex = _load_lexicon(config)
        reports = bias_stage(run, specs, matrices, lex, norm_override=norm_override)
        stream_stage(run, net, lex, config.streams)
        run.promote()
        run.log("run: success")
    return {
        "output_dir": str(config.output_dir),
        "identities": sorted(reports),
        "stats": {
            "node_count": stats.node_count,
            "edge_count": stats.edge_count,
            "diameter": stats.diameter,
        },
    }


def run_single_stage(config: RunConfig, stage: str, norm_override: str | None = None,
                     stream_requests: list[StreamRequest] | None = None,
                     primes: list[str] | None = None,
                     matrix_id: str | None = None) -> dict:
    """Run exactly one stage, reading earlier-stage artifacts from disk."""
    specs = [_load_spec(p) for p in config.prime_specs]
    with _Run(config) as run:
        if stage == "stats":
            net, stats = build_stage(run)
            run.promote()
            return {"stats": json.loads(_stats_json(stats))}
        net, stats = _require_network(run, stage)
        if stage == "spread":
            if primes is not None:
                spread_adhoc(run, net, stats, matrix_id or "adhoc", primes)
                run.promote()
                return {"matrix_id": matrix_id or "adhoc", "primes": primes}
            spread_stage(run, net, stats, specs)
            run.promote()
            return {"identities": [s.identity for s in specs]}
        if stage == "normalize":
            if matrix_id is None or norm_override is None:
                raise ConfigError("normalize stage requires a matrix id and a norm")
            normalize_stage(run, matrix_id, norm_override)
            run.promote()
            return {"matrix_id": matrix_id, "norm": norm_override}
        if stage == "bias":
            matrices = _require_matrices(run, specs)
            lex = _load_lexicon(config)
            reports = bias_stage(run, specs, matrices, lex, norm_override=norm_override)
            run.promote()
            return {"identities": sorted(reports)}
        if stage == "stream":
            lex = _load_lexicon(config)
            stream_stage(run, net, lex, stream_requests or config.streams)
            run.promote()
            return {"streams": len(stream_requests or config.streams)}
    raise ConfigError(f"unknown stage: {stage!r}")


def _require_network(run: _Run, stage: str):
    net_path = run.out / "network/network.tsv"
    stats_path = run.out / "network/stats.json"
    if not net_path.exists() or not stats_path.exists():
        raise ComputeError(
            f"[stage:{stage}] network artifacts missing; run the 'stats' stage first"
        )
    return network.load_network(net_path), _stats_from_json(stats_path)


def _require_matrices(run: _Run, specs: list[PrimeSpec]):
    matrices = {}
    for spec in specs:
        rel = f"matrices/{spec.identity}.raw"
        tsv, sidecar = run.out / (rel + ".tsv"), run.out / (rel + ".json")
        if not tsv.exists() or not sidecar.exists():
            raise ComputeError(
                f"[stage:bias] raw matrix for {spec.identity!r} missing; "
                "run the 'spread' stage first"
            )
        matrix, _ = activation.load_matrix(tsv, sidecar)
        matrices[spec.identity] = matrix
    return matrices
