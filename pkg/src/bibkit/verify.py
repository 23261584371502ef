"""Field-level verification of candidate entries against version-aware ground truth.

Stage 1 is rule-based and produces C, M, or X (or leaves the slot pending).
Stage 2 is a deterministic overlap heuristic producing two binary criteria
(partial match / different paper) that map onto P, S, or F. Matching any
ground-truth version counts as correct: citing the arXiv preprint of a paper
that also has a journal version is not an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from pathlib import Path

from .model import ALL_SLOTS, BibEntry, FieldLabel, FieldSlot, slot_of
from .normalize import (
    EmptyAuthor,
    MalformedPages,
    MalformedYear,
    VenueSynonymTable,
    author_lastname_list,
    jaccard,
    normalize_author,
    normalize_doi,
    normalize_pages,
    normalize_title,
    normalize_venue,
    normalize_year,
    tokenize_filtered,
)

#: Sentinel for slots Stage 1 could not resolve.
PENDING = "pending"

MET = "met"
UNMET = "unmet"
CANNOT_ASSESS = "cannot_assess"

ERROR_LABELS = frozenset({FieldLabel.M, FieldLabel.F, FieldLabel.P, FieldLabel.S})

#: Stage-2 frozen constants.
TOKEN_OVERLAP_THRESHOLD = 0.5
YEAR_SLACK = 1
DOI_SUFFIX_SIMILARITY = 0.8

#: Slots that are typically not applicable for a given entry type.
INAPPLICABLE: dict[str, frozenset[FieldSlot]] = {
    "inproceedings": frozenset({FieldSlot.VOLUME, FieldSlot.NUMBER}),
    "misc": frozenset({FieldSlot.VOLUME, FieldSlot.NUMBER, FieldSlot.PAGES}),
}

#: Slots where a "different paper" determination is meaningful. Numeric
#: metadata carries too little identity to trace to another specific work.
SUBSTITUTABLE_SLOTS = frozenset(
    {FieldSlot.AUTHOR, FieldSlot.TITLE, FieldSlot.VENUE, FieldSlot.DOI}
)

#: Context slots consulted as wrong-paper evidence.
IDENTITY_SLOTS = (FieldSlot.AUTHOR, FieldSlot.TITLE, FieldSlot.VENUE, FieldSlot.YEAR)

#: Entry types considered semantically related for partial-match purposes.
RELATED_ENTRY_TYPES = frozenset({"article", "inproceedings", "misc", "incollection"})


@dataclass(frozen=True)
class GroundTruthVersion:
    version_type: str  # arxiv | proceedings | journal
    fields: dict[str, str]  # slot name -> value

    def get(self, slot: FieldSlot) -> str | None:
        return self.fields.get(slot.value)


@dataclass(frozen=True)
class GroundTruth:
    """All citable versions of one paper plus canonical resolved fields."""

    paper_id: str
    versions: tuple[GroundTruthVersion, ...]
    canonical: dict[str, tuple[str, str]] = field(default_factory=dict)  # slot -> (value, source)
    known_aliases: tuple[dict[str, str], ...] = ()  # confusable other-paper records

    def values_for(self, slot: FieldSlot) -> list[str]:
        values = []
        for version in self.versions:
            v = version.get(slot)
            if v is not None and v.strip():
                values.append(v)
        return values


@dataclass
class CriterionVerdict:
    partial_match: str  # met | unmet | cannot_assess
    different_paper: str


@dataclass
class EntryVerdict:
    labels: dict[FieldSlot, FieldLabel]
    fully_correct: bool
    error_mode: str  # none | isolated | wholesale | mixed
    stage2_slots: frozenset[FieldSlot] = frozenset()


def _normalized(slot: FieldSlot, value: str, table: VenueSynonymTable | None) -> str | None:
    """Per-slot normalization; None when the value cannot be normalized."""
    try:
        if slot is FieldSlot.AUTHOR:
            return normalize_author(value)
        if slot is FieldSlot.TITLE:
            return normalize_title(value)
        if slot is FieldSlot.VENUE:
            return normalize_venue(value, table)
        if slot is FieldSlot.DOI:
            return normalize_doi(value)
        if slot is FieldSlot.PAGES:
            return normalize_pages(value)
        if slot is FieldSlot.YEAR:
            return normalize_year(value)
        if slot is FieldSlot.ENTRY_TYPE:
            return value.strip().lower()
        return value.strip()
    except (EmptyAuthor, MalformedPages, MalformedYear):
        return None


def classify_stage1(
    entry: BibEntry,
    slot: FieldSlot,
    gt: GroundTruth,
    table: VenueSynonymTable | None = None,
):
    """Rule-based labels: X, M, C, or PENDING, in that rule order."""
    if slot is FieldSlot.ENTRY_KEY:
        return FieldLabel.X
    if slot in INAPPLICABLE.get(entry.entry_type, frozenset()):
        return FieldLabel.X
    gt_values = gt.values_for(slot)
    if not gt_values:
        return FieldLabel.X
    value = slot_of(entry, slot)
    if value is None or not value.strip():
        return FieldLabel.M
    norm = _normalized(slot, value, table)
    if norm is not None:
        for gt_value in gt_values:
            gt_norm = _normalized(slot, gt_value, table)
            if gt_norm is not None and norm == gt_norm:
                return FieldLabel.C
    return PENDING


def _page_range(value: str) -> tuple[int, int] | None:
    nums = re.findall(r"\d+", value)
    if not nums:
        return None
    if len(nums) == 1:
        return int(nums[0]), int(nums[0])
    return int(nums[0]), int(nums[1])


_ARXIV_DOI_RE = re.compile(r"^10\.48550/arxiv\.(.+)$")


def _doi_partial(value: str, gt: GroundTruth) -> bool:
    norm = normalize_doi(value)
    gt_dois = [normalize_doi(v) for v in gt.values_for(FieldSlot.DOI)]
    for gt_doi in gt_dois:
        if norm == gt_doi:
            return True
        my_reg, _, my_suffix = norm.partition("/")
        gt_reg, _, gt_suffix = gt_doi.partition("/")
        if my_reg == gt_reg and my_suffix and gt_suffix:
            if SequenceMatcher(None, my_suffix, gt_suffix).ratio() >= DOI_SUFFIX_SIMILARITY:
                return True
    # a preprint DOI encoding the same arXiv id as a ground-truth arXiv
    # version is a version variant of the same work, not a different paper
    m = _ARXIV_DOI_RE.match(norm)
    if m:
        arxiv_id = m.group(1)
        for version in gt.versions:
            if version.version_type == "arxiv" and any(
                arxiv_id in v.lower() for v in version.fields.values()
            ):
                return True
    return False


def _suspect(label) -> bool:
    """Context label that counts as wrong-paper evidence."""
    return label is not None and label not in (FieldLabel.C, FieldLabel.X)


def classify_stage2(
    entry_value: str,
    slot: FieldSlot,
    gt: GroundTruth,
    context: dict[FieldSlot, object] | None = None,
    table: VenueSynonymTable | None = None,
) -> CriterionVerdict:
    """Deterministic overlap heuristic for slots Stage 1 left pending."""
    context = context or {}
    gt_values = gt.values_for(slot)
    value_tokens = tokenize_filtered(entry_value)

    if not gt_values:
        partial = CANNOT_ASSESS
    else:
        partial = MET if _partial_match(entry_value, value_tokens, slot, gt, gt_values, context, table) else UNMET

    different = UNMET
    if partial is not MET and slot in SUBSTITUTABLE_SLOTS:
        if _matches_alias(entry_value, slot, gt, table):
            different = MET
        else:
            suspects = sum(
                1 for s in IDENTITY_SLOTS if s is not slot and _suspect(context.get(s))
            )
            zero_overlap = all(
                jaccard(value_tokens, tokenize_filtered(v)) == 0.0 for v in gt_values
            ) if gt_values else False
            if suspects >= 2 and zero_overlap:
                different = MET
    return CriterionVerdict(partial_match=partial, different_paper=different)


def _partial_match(entry_value, value_tokens, slot, gt, gt_values, context, table) -> bool:
    if slot in (FieldSlot.TITLE, FieldSlot.VENUE, FieldSlot.AUTHOR):
        for gt_value in gt_values:
            if jaccard(value_tokens, tokenize_filtered(gt_value)) >= TOKEN_OVERLAP_THRESHOLD:
                return True
        if slot is FieldSlot.AUTHOR:
            try:
                mine = set(author_lastname_list(entry_value))
            except EmptyAuthor:
                return False
            for gt_value in gt_values:
                try:
                    theirs = set(author_lastname_list(gt_value))
                except EmptyAuthor:
                    continue
                smaller = min(len(mine), len(theirs))
                if smaller and len(mine & theirs) / smaller >= TOKEN_OVERLAP_THRESHOLD:
                    return True
        return False
    if slot is FieldSlot.PAGES:
        mine = _page_range(entry_value)
        if mine is None:
            return False
        for gt_value in gt_values:
            theirs = _page_range(gt_value)
            if theirs and mine[0] <= theirs[1] and theirs[0] <= mine[1]:
                return True
        return False
    if slot is FieldSlot.YEAR:
        my_years = re.findall(r"\d{4}", entry_value)
        if not my_years:
            return False
        for gt_value in gt_values:
            gt_years = re.findall(r"\d{4}", gt_value)
            if gt_years and abs(int(my_years[0]) - int(gt_years[0])) <= YEAR_SLACK:
                return True
        return False
    if slot is FieldSlot.DOI:
        return _doi_partial(entry_value, gt)
    if slot in (FieldSlot.VOLUME, FieldSlot.NUMBER):
        return any(entry_value.strip() == v.strip() for v in gt_values)
    if slot is FieldSlot.ENTRY_TYPE:
        mine = entry_value.strip().lower()
        related = mine in RELATED_ENTRY_TYPES and all(
            v.strip().lower() in RELATED_ENTRY_TYPES for v in gt_values
        )
        if not related:
            return False
        suspects = sum(1 for s in IDENTITY_SLOTS if _suspect(context.get(s)))
        return suspects < 2
    return False


def _matches_alias(entry_value: str, slot: FieldSlot, gt: GroundTruth, table) -> bool:
    """Value traces to a known confusable record for a different paper."""
    for alias in gt.known_aliases:
        alias_value = alias.get(slot.value)
        if not alias_value:
            continue
        if slot is FieldSlot.DOI:
            if normalize_doi(entry_value) == normalize_doi(alias_value):
                return True
            continue
        mine = _normalized(slot, entry_value, table)
        theirs = _normalized(slot, alias_value, table)
        if mine is not None and mine == theirs:
            return True
        if jaccard(tokenize_filtered(entry_value), tokenize_filtered(alias_value)) >= TOKEN_OVERLAP_THRESHOLD:
            return True
    return False


def verdict_from_criteria(cv: CriterionVerdict) -> FieldLabel:
    """The seven-row mapping from criteria to P/S/F."""
    if cv.partial_match == MET:
        return FieldLabel.P
    if cv.different_paper == MET:
        return FieldLabel.S
    return FieldLabel.F


def classify_error_mode(labels: dict[FieldSlot, FieldLabel]) -> str:
    error_slots = [s for s, l in labels.items() if l in ERROR_LABELS]
    if not error_slots:
        return "none"
    substituted = sum(1 for s in error_slots if labels[s] is FieldLabel.S)
    if substituted >= 3:
        return "wholesale"
    if len(error_slots) <= 2:
        return "isolated"
    return "mixed"


def verify_entry(
    entry: BibEntry,
    gt: GroundTruth,
    table: VenueSynonymTable | None = None,
) -> EntryVerdict:
    """Two-stage labeling of all ten slots."""
    stage1: dict[FieldSlot, object] = {
        slot: classify_stage1(entry, slot, gt, table) for slot in ALL_SLOTS
    }
    labels: dict[FieldSlot, FieldLabel] = {}
    stage2_slots = set()
    for slot, result in stage1.items():
        if result is PENDING:
            context = {s: r for s, r in stage1.items() if s is not slot}
            value = slot_of(entry, slot) or ""
            cv = classify_stage2(value, slot, gt, context, table)
            labels[slot] = verdict_from_criteria(cv)
            stage2_slots.add(slot)
        else:
            labels[slot] = result
    evaluable = [l for s, l in labels.items() if l is not FieldLabel.X]
    fully_correct = all(l is FieldLabel.C for l in evaluable)
    return EntryVerdict(
        labels=labels,
        fully_correct=fully_correct,
        error_mode=classify_error_mode(labels),
        stage2_slots=frozenset(stage2_slots),
    )


# --------------------------------------------------------------------------
# corpus aggregates


EVALUABLE_SLOTS = tuple(s for s in ALL_SLOTS if s is not FieldSlot.ENTRY_KEY)


def co_error_matrix(
    verdicts: list[EntryVerdict],
) -> dict[FieldSlot, dict[FieldSlot, float | None]]:
    """Conditional probability P(slot j wrong | slot i wrong).

    Cells with zero denominator are None (undefined), never 0.
    """
    if not verdicts:
        raise ValueError("need at least one verdict")
    matrix: dict[FieldSlot, dict[FieldSlot, float | None]] = {}
    for i in EVALUABLE_SLOTS:
        row: dict[FieldSlot, float | None] = {}
        conditioning = [
            v for v in verdicts if v.labels[i] is not FieldLabel.X and v.labels[i] in ERROR_LABELS
        ]
        for j in EVALUABLE_SLOTS:
            if not conditioning:
                row[j] = None
            else:
                wrong = sum(1 for v in conditioning if v.labels[j] in ERROR_LABELS)
                row[j] = wrong / len(conditioning)
        matrix[i] = row
    return matrix


@dataclass(frozen=True)
class TaggedVerdict:
    paper_id: str
    entry_tag: str
    verdict: EntryVerdict
    model: str = ""
    tier: str = ""
    domain: str = ""


def _bucket() -> dict:
    return {"evaluable": 0, "correct": 0}


def _pct(bucket: dict) -> dict:
    pct = round(100.0 * bucket["correct"] / bucket["evaluable"], 1) if bucket["evaluable"] else None
    return {**bucket, "pct_c": pct}


def aggregate_stats(tagged: list[TaggedVerdict]) -> dict:
    """Accuracy tables and label distribution; X slots never enter denominators."""
    overall = _bucket()
    per_field: dict[str, dict] = {s.value: _bucket() for s in EVALUABLE_SLOTS}
    per_tag: dict[str, dict[str, dict]] = {"model": {}, "tier": {}, "domain": {}}
    label_distribution = {l.value: 0 for l in (FieldLabel.C, FieldLabel.M, FieldLabel.F, FieldLabel.P, FieldLabel.S)}
    fully_correct = 0

    for tv in tagged:
        if tv.verdict.fully_correct:
            fully_correct += 1
        for slot in EVALUABLE_SLOTS:
            label = tv.verdict.labels[slot]
            if label is FieldLabel.X:
                continue
            label_distribution[label.value] += 1
            for bucket in (
                overall,
                per_field[slot.value],
                per_tag["model"].setdefault(tv.model, _bucket()),
                per_tag["tier"].setdefault(tv.tier, _bucket()),
                per_tag["domain"].setdefault(tv.domain, _bucket()),
            ):
                bucket["evaluable"] += 1
                if label is FieldLabel.C:
                    bucket["correct"] += 1

    report = {
        "format_version": 1,
        "entries": len(tagged),
        "overall": _pct(overall),
        "fully_correct": {
            "count": fully_correct,
            "pct": round(100.0 * fully_correct / len(tagged), 1) if tagged else None,
        },
        "label_distribution": label_distribution,
        "per_field": {name: _pct(b) for name, b in sorted(per_field.items())},
    }
    for kind, buckets in per_tag.items():
        report[f"per_{kind}"] = {tag: _pct(b) for tag, b in sorted(buckets.items())}
    return report


# --------------------------------------------------------------------------
# label file I/O

LABELS_HEADER = "format_version\t1"


def write_labels(path: str | Path, rows: list[tuple[str, str, str, str, str]]) -> None:
    """Line-delimited records: paper_id, entry_tag, slot, label, stage."""
    lines = [LABELS_HEADER]
    lines += ["\t".join(row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")


def read_labels(path: str | Path) -> list[tuple[str, str, str, str, str]]:
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines or lines[0] != LABELS_HEADER:
        raise ValueError("unrecognized labels file format")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"malformed labels row: {line!r}")
        rows.append(tuple(parts))
    return rows
