"""Corpus ingestion, version classification, canonical resolution, benchmarks.

The corpus is line-delimited JSON (one paper per line) behind a leading
format-version header, so runs are streamable and reports diffable. All
output files are written atomically and identically across repeat runs.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .model import BibEntry, BibParseError, FieldLabel, FieldSlot, parse_entry, serialize_entry
from .normalize import VenueSynonymTable
from .reconcile import PaperMeta, ReconcileOutcome, reconcile
from .resolve import ResolutionResult
from .verify import (
    ERROR_LABELS,
    EVALUABLE_SLOTS,
    EntryVerdict,
    GroundTruth,
    GroundTruthVersion,
    TaggedVerdict,
    aggregate_stats,
    co_error_matrix,
    verify_entry,
)

CORPUS_HEADER = {"format_version": 1, "kind": "bibkit-corpus"}

TIERS = frozenset({"popular", "low_citation", "recent"})

#: Location classes; the three excluded source kinds collapse into one class.
LOCATION_CLASSES = ("arxiv", "proceedings", "journal", "excluded")


class CorpusParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NoResolvableFields(ValueError):
    pass


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    domain: str
    tier: str
    description: str
    locations: tuple[tuple[str, str], ...]
    ground_truth: GroundTruth
    candidates: tuple[tuple[str, str, BibEntry], ...]  # (tag, model, entry)
    meta: PaperMeta | None = None


def classify_location(url: str, source_type: str) -> str:
    """Version type of a hosting location; rule order is significant."""
    if "arxiv.org" in url.lower():
        return "arxiv"
    if source_type == "conference":
        return "proceedings"
    if source_type == "journal":
        return "journal"
    return "excluded"


def dedupe_locations(locations: list[tuple[str, str]]) -> dict[str, tuple[str, str]]:
    """One location per retained class, preferring DOI-style URLs."""
    chosen: dict[str, tuple[str, str]] = {}
    for url, source_type in locations:
        cls = classify_location(url, source_type)
        if cls == "excluded":
            continue
        current = chosen.get(cls)
        if current is None:
            chosen[cls] = (url, source_type)
        elif "doi.org" in url.lower() and "doi.org" not in current[0].lower():
            chosen[cls] = (url, source_type)
    return chosen


@dataclass(frozen=True)
class SourceRecord:
    source: str  # openalex | zotero | dblp | pubmed | ...
    fields: dict[str, str]
    version_type: str | None = None  # arxiv | proceedings | journal


_DOMAIN_DBS = ("dblp", "pubmed")
_VERSION_PRIORITY = {"journal": 0, "proceedings": 1, "arxiv": 2}


def _source_priority(record: SourceRecord) -> int:
    if record.source in _DOMAIN_DBS:
        return 0
    if record.source == "zotero":
        return 1
    if record.version_type == "arxiv" or record.source == "arxiv":
        return 2
    return 3


def resolve_canonical(sources: list[SourceRecord]) -> dict[str, tuple[str, str]]:
    """One canonical value per slot under per-slot source priority rules."""
    if not sources or all(not s.fields for s in sources):
        raise NoResolvableFields("no source carries any field")

    def first_from(order: list[list[str]], slot: str) -> tuple[str, str] | None:
        for group in order:
            for record in sources:
                if record.source in group or "*" in group:
                    value = record.fields.get(slot)
                    if value is not None and value.strip():
                        return value, record.source
        return None

    canonical: dict[str, tuple[str, str]] = {}

    hit = first_from([["openalex"], list(_DOMAIN_DBS), ["zotero"], ["*"]], "doi")
    if hit:
        canonical["doi"] = hit
    hit = first_from([["zotero"], list(_DOMAIN_DBS), ["openalex"], ["*"]], "title")
    if hit:
        canonical["title"] = hit
    for slot in ("author", "venue"):
        hit = first_from([list(_DOMAIN_DBS), ["zotero"], ["*"]], slot)
        if hit:
            canonical[slot] = hit

    years = [(r.fields["year"].strip(), r) for r in sources if r.fields.get("year", "").strip()]
    if years:
        counts = Counter(y for y, _ in years)
        best = max(counts.values())
        leaders = sorted(y for y, n in counts.items() if n == best)
        if len(leaders) == 1:
            canonical["year"] = (leaders[0], "majority")
        else:
            tie_pool = [(y, r) for y, r in years if y in leaders]
            tie_pool.sort(key=lambda pair: (_source_priority(pair[1]), pair[0]))
            year, record = tie_pool[0]
            canonical["year"] = (year, f"majority_tiebreak:{record.source}")

    for slot in ("volume", "number", "pages"):
        holders = [
            r
            for r in sources
            if r.fields.get(slot, "").strip() and r.version_type in _VERSION_PRIORITY
        ]
        holders.sort(key=lambda r: _VERSION_PRIORITY[r.version_type])
        if holders:
            canonical[slot] = (holders[0].fields[slot].strip(), holders[0].source)
        else:
            hit = first_from([["*"]], slot)
            if hit:
                canonical[slot] = hit

    return canonical


# --------------------------------------------------------------------------
# corpus I/O


def _parse_record(doc: dict, line_no: int, seen_ids: set[str]) -> PaperRecord:
    def fail(reason: str):
        raise CorpusParseError(line_no, reason)

    paper_id = doc.get("paper_id")
    if not paper_id:
        fail("missing paper_id")
    if paper_id in seen_ids:
        fail(f"duplicate paper_id {paper_id!r}")
    if not doc.get("description", "").strip():
        fail("missing description")
    tier = doc.get("tier", "")
    if tier not in TIERS:
        fail(f"unknown tier {tier!r}")

    gt_doc = doc.get("ground_truth") or {}
    versions = tuple(
        GroundTruthVersion(version_type=v.get("version_type", ""), fields=dict(v.get("fields", {})))
        for v in gt_doc.get("versions", [])
    )
    if not versions:
        fail("ground truth needs at least one version")
    canonical = {
        slot: (entry["value"], entry.get("source", ""))
        for slot, entry in (gt_doc.get("canonical") or {}).items()
    }
    gt = GroundTruth(
        paper_id=paper_id,
        versions=versions,
        canonical=canonical,
        known_aliases=tuple(dict(a) for a in gt_doc.get("known_aliases", [])),
    )

    candidates = []
    for c in doc.get("candidates", []):
        try:
            entry = parse_entry(c["bibtex"])
        except (KeyError, BibParseError) as exc:
            fail(f"candidate {c.get('tag', '?')!r}: {exc}")
        candidates.append((c.get("tag", "candidate"), c.get("model", ""), entry))

    meta = None
    if "meta" in doc:
        m = doc["meta"]
        meta = PaperMeta(paper_id, url=m.get("url"), doi=m.get("doi"), title=m.get("title"))

    return PaperRecord(
        paper_id=paper_id,
        domain=doc.get("domain", ""),
        tier=tier,
        description=doc["description"],
        locations=tuple((l.get("url", ""), l.get("source_type", "")) for l in doc.get("locations", [])),
        ground_truth=gt,
        candidates=tuple(candidates),
        meta=meta,
    )


def load_corpus(path: str | Path, permissive: bool = False) -> list[PaperRecord]:
    records: list[PaperRecord] = []
    errors: list[CorpusParseError] = []
    seen_ids: set[str] = set()
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines:
        raise CorpusParseError(1, "empty corpus file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorpusParseError(1, f"bad header: {exc}") from exc
    if header.get("format_version") != 1:
        raise CorpusParseError(1, "unsupported corpus format version")
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            err = CorpusParseError(line_no, f"bad JSON: {exc}")
            if permissive:
                errors.append(err)
                continue
            raise err from None
        try:
            record = _parse_record(doc, line_no, seen_ids)
        except CorpusParseError as err:
            if permissive:
                errors.append(err)
                continue
            raise
        seen_ids.add(record.paper_id)
        records.append(record)
    return records


def default_meta(record: PaperRecord) -> PaperMeta:
    """Reconciliation metadata derived from the record when none is supplied."""
    if record.meta is not None:
        return record.meta
    url = None
    for loc_url, source_type in record.locations:
        if classify_location(loc_url, source_type) != "excluded":
            url = loc_url
            break
    gt = record.ground_truth
    doi = gt.canonical.get("doi", (None,))[0] if "doi" in gt.canonical else None
    title = gt.canonical.get("title", (None,))[0] if "title" in gt.canonical else None
    if doi is None:
        dois = gt.values_for(FieldSlot.DOI)
        doi = dois[0] if dois else None
    if title is None:
        titles = gt.values_for(FieldSlot.TITLE)
        title = titles[0] if titles else None
    return PaperMeta(record.paper_id, url=url, doi=doi, title=title)


# --------------------------------------------------------------------------
# benchmark


def _matrix_json(matrix) -> dict:
    return {
        i.value: {j.value: (None if v is None else round(v, 6)) for j, v in row.items()}
        for i, row in matrix.items()
    }


def _labels_rows(paper_id: str, tag: str, verdict: EntryVerdict) -> list[tuple[str, ...]]:
    rows = []
    for slot in FieldSlot:
        stage = "2" if slot in verdict.stage2_slots else "1"
        rows.append((paper_id, tag, slot.value, verdict.labels[slot].value, stage))
    return rows


def _field_deltas(
    before: list[tuple[str, str, EntryVerdict]], after: list[tuple[str, str, EntryVerdict]]
) -> dict:
    """Per-field correction/regression accounting between two labelings."""
    after_map = {(pid, tag): v for pid, tag, v in after}
    deltas: dict[str, dict] = {}
    for slot in EVALUABLE_SLOTS:
        corrections = regressions = before_c = after_c = evaluable = 0
        for pid, tag, verdict_before in before:
            verdict_after = after_map.get((pid, tag))
            if verdict_after is None:
                continue
            lb = verdict_before.labels[slot]
            la = verdict_after.labels[slot]
            if lb is FieldLabel.X or la is FieldLabel.X:
                continue
            evaluable += 1
            if lb is FieldLabel.C:
                before_c += 1
            if la is FieldLabel.C:
                after_c += 1
            if lb is not FieldLabel.C and la is FieldLabel.C:
                corrections += 1
            if lb is FieldLabel.C and la is not FieldLabel.C:
                regressions += 1
        deltas[slot.value] = {
            "evaluable": evaluable,
            "before_c": before_c,
            "after_c": after_c,
            "corrections": corrections,
            "regressions": regressions,
        }
    return deltas


def run_benchmark(
    corpus: list[PaperRecord],
    mode: str = "verify",
    resolver: Callable[[str], ResolutionResult] | None = None,
    table: VenueSynonymTable | None = None,
    workers: int = 1,
) -> dict:
    """Label every candidate entry; optionally reconcile first.

    Returns the full report bundle as a dict; a failing record is recorded
    under "incomplete" and never aborts the run.
    """
    if mode not in ("verify", "reconcile_then_verify"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "reconcile_then_verify" and resolver is None:
        raise ValueError("reconcile_then_verify requires a resolver")
    if table is None:
        table = VenueSynonymTable.default()

    ordered = sorted(corpus, key=lambda r: r.paper_id)

    def process(record: PaperRecord):
        out = []
        for tag, model, entry in record.candidates:
            before = verify_entry(entry, record.ground_truth, table)
            outcome: ReconcileOutcome | None = None
            after = None
            if mode == "reconcile_then_verify":
                outcome = reconcile(default_meta(record), entry, resolver)
                after = verify_entry(outcome.result, record.ground_truth, table)
            out.append((tag, model, before, after, outcome))
        return out

    results: dict[str, object] = {}
    incomplete: list[dict] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {r.paper_id: pool.submit(process, r) for r in ordered}
        for paper_id, fut in futures.items():
            try:
                results[paper_id] = fut.result()
            except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                incomplete.append({"paper_id": paper_id, "error": str(exc)})
    else:
        for record in ordered:
            try:
                results[record.paper_id] = process(record)
            except Exception as exc:  # noqa: BLE001
                incomplete.append({"paper_id": record.paper_id, "error": str(exc)})

    tagged: list[TaggedVerdict] = []
    tagged_before: list[TaggedVerdict] = []
    labels_rows: list[tuple[str, ...]] = []
    labels_before_rows: list[tuple[str, ...]] = []
    actions: list[dict] = []
    before_list: list[tuple[str, str, EntryVerdict]] = []
    after_list: list[tuple[str, str, EntryVerdict]] = []

    for record in ordered:
        if record.paper_id not in results:
            continue
        for tag, model, before, after, outcome in results[record.paper_id]:
            final = after if after is not None else before
            tagged.append(
                TaggedVerdict(record.paper_id, tag, final, model, record.tier, record.domain)
            )
            labels_rows.extend(_labels_rows(record.paper_id, tag, final))
            if after is not None:
                tagged_before.append(
                    TaggedVerdict(record.paper_id, tag, before, model, record.tier, record.domain)
                )
                labels_before_rows.extend(_labels_rows(record.paper_id, tag, before))
                before_list.append((record.paper_id, tag, before))
                after_list.append((record.paper_id, tag, after))
                actions.append(
                    {
                        "paper_id": record.paper_id,
                        "tag": tag,
                        "action": outcome.action,
                        "gate_score": outcome.gate_score,
                        "replaced_slots": sorted(s.value for s in outcome.replaced_slots),
                    }
                )

    verdicts = [tv.verdict for tv in tagged]
    bundle: dict = {
        "format_version": 1,
        "mode": mode,
        "aggregate": aggregate_stats(tagged),
        "error_modes": dict(sorted(Counter(v.error_mode for v in verdicts).items())),
        "co_error": _matrix_json(co_error_matrix(verdicts)) if verdicts else {},
        "incomplete": sorted(incomplete, key=lambda d: d["paper_id"]),
        "labels": labels_rows,
    }
    if mode == "reconcile_then_verify":
        bundle["aggregate_before"] = aggregate_stats(tagged_before)
        bundle["labels_before"] = labels_before_rows
        bundle["deltas"] = _field_deltas(before_list, after_list)
        bundle["actions"] = actions
    return bundle


# --------------------------------------------------------------------------
# atomic report writing


def _write_atomic(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_bundle(bundle: dict, out_dir: str | Path) -> None:
    """Materialize a report bundle: report.json plus labels/actions files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    from .verify import LABELS_HEADER

    def labels_text(rows) -> str:
        return "\n".join([LABELS_HEADER] + ["\t".join(r) for r in rows]) + "\n"

    _write_atomic(out / "labels.tsv", labels_text(bundle["labels"]))
    if "labels_before" in bundle:
        _write_atomic(out / "labels_before.tsv", labels_text(bundle["labels_before"]))
    if "actions" in bundle:
        lines = ["format_version\t1"]
        for a in bundle["actions"]:
            score = "" if a["gate_score"] is None else f"{a['gate_score']:.6f}"
            lines.append(
                "\t".join(
                    [a["paper_id"], a["tag"], a["action"], score, ",".join(a["replaced_slots"])]
                )
            )
        _write_atomic(out / "actions.tsv", "\n".join(lines) + "\n")

    report = {k: v for k, v in bundle.items() if k not in ("labels", "labels_before", "actions")}
    _write_atomic(out / "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")


def write_revised_bib(entries: list[BibEntry], path: str | Path) -> None:
    text = "\n\n".join(serialize_entry(e) for e in entries) + "\n"
    _write_atomic(Path(path), text)
