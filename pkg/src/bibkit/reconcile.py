"""Two-stage reconciliation: lookup, title gate, asymmetric field merge.

The authoritative record wins for every standard slot it carries; the
baseline value survives only where the authoritative record is silent.
Every non-merged path is a strict no-op on the baseline entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .model import BibEntry, FieldSlot, VALUE_SLOTS, slot_of
from .normalize import jaccard, tokenize_filtered
from .resolve import ResolutionResult, classify_query

#: Jaccard threshold for the reconciliation title gate (inclusive).
RECONCILE_GATE_THRESHOLD = 0.3

#: Plain field names replaced wholesale when the authoritative record has them.
_STANDARD_FIELD_NAMES = ("author", "title", "year", "volume", "number", "pages", "doi")


@dataclass(frozen=True)
class PaperMeta:
    paper_id: str
    url: str | None = None
    doi: str | None = None
    title: str | None = None


@dataclass
class ReconcileOutcome:
    result: BibEntry
    action: str  # merged | kept_baseline_no_query | kept_baseline_not_found | kept_baseline_title_mismatch
    gate_score: float | None = None
    replaced_slots: frozenset[FieldSlot] = frozenset()


def build_query(meta: PaperMeta) -> str | None:
    """First non-empty of url, doi, title."""
    for value in (meta.url, meta.doi, meta.title):
        if value and value.strip():
            return value.strip()
    return None


def title_gate(query_or_title: str, authoritative_title: str) -> tuple[bool, float]:
    score = jaccard(tokenize_filtered(query_or_title), tokenize_filtered(authoritative_title))
    return score >= RECONCILE_GATE_THRESHOLD, score


def merge_fields(
    baseline: BibEntry, authoritative: BibEntry
) -> tuple[BibEntry, frozenset[FieldSlot]]:
    """Database-wins merge over the standard slots.

    The citation key stays with the baseline (downstream documents already
    reference it); non-standard baseline fields pass through unchanged.
    """
    replaced: set[FieldSlot] = set()
    auth_venue = slot_of(authoritative, FieldSlot.VENUE)
    auth_venue_field = None
    if auth_venue is not None:
        auth_venue_field = "journal" if authoritative.get("journal") is not None else "booktitle"

    merged: dict[str, str] = {}
    venue_placed = False
    for name, value in baseline.fields.items():
        if name in ("journal", "booktitle"):
            if auth_venue_field is None:
                merged[name] = value
            elif not venue_placed:
                merged[auth_venue_field] = auth_venue
                venue_placed = True
                replaced.add(FieldSlot.VENUE)
            continue
        if name in _STANDARD_FIELD_NAMES:
            auth_value = authoritative.get(name)
            if auth_value is not None:
                merged[name] = auth_value
                replaced.add(FieldSlot(name))
            else:
                merged[name] = value
            continue
        merged[name] = value

    # standard slots the baseline lacked entirely
    for slot in VALUE_SLOTS:
        if slot is FieldSlot.VENUE:
            if auth_venue_field is not None and not venue_placed:
                merged[auth_venue_field] = auth_venue
                venue_placed = True
                replaced.add(FieldSlot.VENUE)
            continue
        name = slot.value
        if name not in merged:
            auth_value = authoritative.get(name)
            if auth_value is not None:
                merged[name] = auth_value
                replaced.add(slot)

    entry_type = baseline.entry_type
    if authoritative.entry_type:
        entry_type = authoritative.entry_type
        replaced.add(FieldSlot.ENTRY_TYPE)
    result = BibEntry(entry_type, baseline.citation_key, merged)
    return result, frozenset(replaced)


def reconcile(
    meta: PaperMeta,
    baseline: BibEntry,
    resolver: Callable[[str], ResolutionResult],
) -> ReconcileOutcome:
    """End-to-end reconciliation of one baseline entry.

    The resolver is any callable mapping a query string to a
    ResolutionResult; upstream errors propagate and never modify the
    baseline.
    """
    query = build_query(meta)
    if query is None:
        return ReconcileOutcome(result=baseline, action="kept_baseline_no_query")

    result = resolver(query)
    if result.status == "title_mismatch":
        return ReconcileOutcome(result=baseline, action="kept_baseline_title_mismatch")
    if result.status != "found" or result.bibtex is None:
        return ReconcileOutcome(result=baseline, action="kept_baseline_not_found")

    authoritative = result.bibtex
    auth_title = slot_of(authoritative, FieldSlot.TITLE) or ""

    # identifier queries resolve deterministically, so the gate compares
    # title metadata when available and auto-passes otherwise
    gate_input: str | None
    if classify_query(query).kind == "title":
        gate_input = query
    else:
        gate_input = meta.title

    gate_score: float | None = None
    if gate_input is not None:
        passed, gate_score = title_gate(gate_input, auth_title)
        if not passed:
            return ReconcileOutcome(
                result=baseline, action="kept_baseline_title_mismatch", gate_score=gate_score
            )

    merged, replaced = merge_fields(baseline, authoritative)
    return ReconcileOutcome(
        result=merged, action="merged", gate_score=gate_score, replaced_slots=replaced
    )
