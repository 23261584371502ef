"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 corpus/input error,
3 upstream unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    CorpusParseError,
    load_corpus,
    run_benchmark,
    write_bundle,
    write_revised_bib,
)
from .model import BibParseError, parse_bib_file, serialize_entry
from .normalize import VenueSynonymTable
from .reconcile import PaperMeta, reconcile
from .resolve import (
    EmptyQuery,
    ReplayTransport,
    Resolver,
    ResolverConfig,
    UpstreamUnavailable,
)
from .verify import read_labels

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CORPUS = 2
EXIT_UPSTREAM = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_resolver(args) -> Resolver:
    config = ResolverConfig.from_env()
    if getattr(args, "server", None):
        config.base_url = args.server
    transport = None
    if getattr(args, "fixtures", None):
        fixtures = Path(args.fixtures)
        if fixtures.is_dir():
            exchanges = []
            for p in sorted(fixtures.glob("*.json")):
                exchanges.extend(json.loads(p.read_text("utf-8"))["exchanges"])
            transport = ReplayTransport({"format_version": 1, "exchanges": exchanges})
        else:
            transport = ReplayTransport(fixtures)
        config.retry_delay = 0.0
    return Resolver(config, transport=transport)


def _load_table(args) -> VenueSynonymTable:
    if getattr(args, "venues", None):
        return VenueSynonymTable.from_file(args.venues)
    return VenueSynonymTable.default()


def cmd_lookup(args) -> int:
    resolver = _build_resolver(args)
    try:
        result = resolver.resolve(args.query)
    except EmptyQuery:
        print("error: empty query", file=sys.stderr)
        return EXIT_USAGE
    except UpstreamUnavailable as exc:
        print(f"error: upstream unavailable: {exc}", file=sys.stderr)
        return EXIT_UPSTREAM
    if result.status == "found":
        print(serialize_entry(result.bibtex))
        return EXIT_OK
    print(result.status)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        corpus = load_corpus(args.corpus, permissive=args.permissive)
    except CorpusParseError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    bundle = run_benchmark(corpus, mode="verify", table=_load_table(args))
    if args.out:
        write_bundle(bundle, args.out)
        print(f"wrote report bundle to {args.out}")
    else:
        report = {k: v for k, v in bundle.items() if k != "labels"}
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _read_meta_file(path: str) -> list[PaperMeta]:
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines or lines[0] != "format_version\t1":
        raise ValueError("unrecognized metadata file format")
    metas = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = (line.split("\t") + ["", "", "", ""])[:4]
        paper_id, url, doi, title = parts
        metas.append(PaperMeta(paper_id, url=url or None, doi=doi or None, title=title or None))
    return metas


def cmd_reconcile(args) -> int:
    try:
        entries = parse_bib_file(Path(args.bib).read_text("utf-8"))
        metas = _read_meta_file(args.meta)
    except (OSError, BibParseError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    if len(entries) != len(metas):
        print(
            f"input error: {len(entries)} entries but {len(metas)} metadata lines",
            file=sys.stderr,
        )
        return EXIT_CORPUS
    resolver = _build_resolver(args)
    revised = []
    log_lines = ["format_version\t1"]
    try:
        for meta, baseline in zip(metas, entries):
            outcome = reconcile(meta, baseline, resolver.resolve)
            revised.append(outcome.result)
            score = "" if outcome.gate_score is None else f"{outcome.gate_score:.6f}"
            slots = ",".join(sorted(s.value for s in outcome.replaced_slots))
            log_lines.append("\t".join([meta.paper_id, baseline.citation_key, outcome.action, score, slots]))
    except UpstreamUnavailable as exc:
        print(f"error: upstream unavailable: {exc}", file=sys.stderr)
        return EXIT_UPSTREAM
    out = args.out or args.bib + ".revised.bib"
    write_revised_bib(revised, out)
    if args.log:
        Path(args.log).write_text("\n".join(log_lines) + "\n", "utf-8")
    print(f"wrote {len(revised)} entries to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        corpus = load_corpus(args.corpus, permissive=args.permissive)
    except CorpusParseError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    resolver = None
    if args.mode == "reconcile_then_verify":
        resolver = _build_resolver(args).resolve
    try:
        bundle = run_benchmark(
            corpus, mode=args.mode, resolver=resolver, table=_load_table(args), workers=args.workers
        )
    except UpstreamUnavailable as exc:
        print(f"error: upstream unavailable: {exc}", file=sys.stderr)
        return EXIT_UPSTREAM
    if args.out:
        write_bundle(bundle, args.out)
        print(f"wrote report bundle to {args.out}")
    else:
        report = {k: v for k, v in bundle.items() if not k.startswith("labels")}
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        rows = read_labels(args.labels)
    except (OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    per_field: dict[str, dict[str, int]] = {}
    entries: dict[tuple[str, str], bool] = {}
    distribution: dict[str, int] = {}
    for paper_id, tag, slot, label, _stage in rows:
        if label == "X":
            continue
        distribution[label] = distribution.get(label, 0) + 1
        bucket = per_field.setdefault(slot, {"evaluable": 0, "correct": 0})
        bucket["evaluable"] += 1
        if label == "C":
            bucket["correct"] += 1
        key = (paper_id, tag)
        entries[key] = entries.get(key, True) and label == "C"
    evaluable = sum(b["evaluable"] for b in per_field.values())
    correct = sum(b["correct"] for b in per_field.values())
    report = {
        "format_version": 1,
        "entries": len(entries),
        "overall": {
            "evaluable": evaluable,
            "correct": correct,
            "pct_c": round(100.0 * correct / evaluable, 1) if evaluable else None,
        },
        "fully_correct": {
            "count": sum(entries.values()),
            "pct": round(100.0 * sum(entries.values()) / len(entries), 1) if entries else None,
        },
        "label_distribution": dict(sorted(distribution.items())),
        "per_field": {
            slot: {
                **b,
                "pct_c": round(100.0 * b["correct"] / b["evaluable"], 1) if b["evaluable"] else None,
            }
            for slot, b in sorted(per_field.items())
        },
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bibkit", description="Deterministic bibliographic toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lookup", help="resolve an identifier, URL, or title to BibTeX")
    p.add_argument("query")
    p.add_argument("--server", help="translation server base URL")
    p.add_argument("--fixtures", help="replay fixture file or directory (offline)")
    p.set_defaults(func=cmd_lookup)

    p = sub.add_parser("verify", help="label candidate entries against ground truth")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", help="report bundle directory")
    p.add_argument("--venues", help="venue synonym table file")
    p.add_argument("--permissive", action="store_true", help="skip malformed records")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reconcile", help="merge baseline entries with authoritative records")
    p.add_argument("--bib", required=True, help=".bib file of baseline entries")
    p.add_argument("--meta", required=True, help="sidecar metadata file (paper_id/url/doi/title)")
    p.add_argument("--out", help="revised .bib output path")
    p.add_argument("--log", help="per-entry action log path")
    p.add_argument("--server")
    p.add_argument("--fixtures")
    p.set_defaults(func=cmd_reconcile)

    p = sub.add_parser("bench", help="run the benchmark pipeline over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=["verify", "reconcile_then_verify"], default="verify")
    p.add_argument("--fixtures")
    p.add_argument("--server")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--venues")
    p.add_argument("--permissive", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="recompute aggregates from a labels file")
    p.add_argument("--labels", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
