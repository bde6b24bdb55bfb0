#!/usr/bin/env python3
"""Drive full bias-evaluation runs over the real norm datasets.

Expects a data directory laid out as:

    <data>/lwow/mistral.tsv        trial-format norms (cue R1 R2 R3, TSV)
    <data>/lwow/llama3.tsv
    <data>/lwow/haiku.tsv
    <data>/lwow/human.tsv          optional (license-restricted)
    <data>/vocabulary/wordnet.txt  one word per line
    <data>/lexicons/valence.tsv    word<TAB>valence
    <data>/lexicons/emotions.tsv   word<TAB>emotion<TAB>flag (8 core emotions)

For every dataset present it writes a run config wired to the identity specs
in configs/ and executes the full pipeline into <out>/<network>/.

    python scripts/run_reference_datasets.py --data data --out runs
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from assocnet.cli import main as cli_main

REPO = Path(__file__).resolve().parent.parent

NETWORKS = ("human", "mistral", "llama3", "haiku")
IDENTITIES = (
    "gender.json",
    "religion.json",
    "ethnicity.json",
    "sexual_orientation.json",
    "political.json",
)
STREAM_PAIRS = (
    ("feminine", "compassionate"),
    ("feminine", "forceful"),
    ("masculine", "forceful"),
    ("masculine", "compassionate"),
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data", type=Path, default=REPO / "data")
    parser.add_argument("--out", type=Path, default=REPO / "runs")
    parser.add_argument("--networks", nargs="*", default=list(NETWORKS))
    parser.add_argument("--no-cache", action="store_true")
    args = parser.parse_args()

    ran = []
    for name in args.networks:
        norms = args.data / "lwow" / f"{name}.tsv"
        if not norms.exists():
            print(f"skipping {name}: {norms} not found")
            continue
        out_dir = args.out / name
        out_dir.mkdir(parents=True, exist_ok=True)
        config = {
            "norms": str(norms.resolve()),
            "norms_format": "trial",
            "vocabulary": str((args.data / "vocabulary" / "wordnet.txt").resolve()),
            "valence_lexicon": str((args.data / "lexicons" / "valence.tsv").resolve()),
            "emotion_lexicon": str((args.data / "lexicons" / "emotions.tsv").resolve()),
            "prime_specs": [str((REPO / "configs" / spec).resolve()) for spec in IDENTITIES],
            "min_weight": 2,
            "streams": [
                {"prime": p, "target": t, "cost_mode": "inverse_weight"}
                for p, t in STREAM_PAIRS
            ],
            "output_dir": str(out_dir.resolve()),
        }
        config_path = out_dir / "run-config.json"
        config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
        argv = ["run", "--config", str(config_path)]
        if args.no_cache:
            argv.append("--no-cache")
        print(f"== {name} ==")
        code = cli_main(argv)
        if code != 0:
            return code
        ran.append(name)
        # the appendix comparison: emotions evaluated under the other norm too
        code = cli_main(["bias", "--config", str(config_path), "--norm", "l2"])
        if code != 0:
            return code
    print(f"completed runs: {', '.join(ran) if ran else 'none'}")
    return 0 if ran else 1


if __name__ == "__main__":
    sys.exit(main())
