#!/usr/bin/env python3
"""Run the verification benchmark over a corpus and print or write the report.

Defaults to the bundled 20-entry golden corpus so a fresh checkout can be
exercised offline:

    python3 scripts/run_benchmark.py
    python3 scripts/run_benchmark.py --corpus my_corpus.jsonl --out out/
"""

import argparse
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from bibkit.harness import load_corpus, run_benchmark, write_bundle  # noqa: E402

DEFAULT_CORPUS = REPO / "tests" / "fixtures" / "golden_corpus.jsonl"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", default=str(DEFAULT_CORPUS))
    parser.add_argument("--out", help="report bundle directory")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--permissive", action="store_true")
    args = parser.parse_args()

    corpus = load_corpus(args.corpus, permissive=args.permissive)
    bundle = run_benchmark(corpus, mode="verify", workers=args.workers)
    if args.out:
        write_bundle(bundle, args.out)
        print(f"wrote report bundle to {args.out}")
    else:
        report = {k: v for k, v in bundle.items() if k != "labels"}
        print(json.dumps(report, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
