"""BibTeX entry model: parsing, serialization, field slots, and the label alphabet.

The parser handles exactly one entry per input string. Values may be
brace-delimited, quote-delimited, or bare tokens; string concatenation
with ``#`` and ``@string`` macros are rejected.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field


class BibParseError(ValueError):
    """Base class for entry parse failures."""


class UnbalancedBraces(BibParseError):
    pass


class DuplicateField(BibParseError):
    pass


class EmptyKey(BibParseError):
    pass


class MultipleEntries(BibParseError):
    pass


class UnsupportedConcatenation(BibParseError):
    pass


class FieldSlot(str, enum.Enum):
    """The ten evaluated field positions of an entry."""

    ENTRY_TYPE = "entry_type"
    ENTRY_KEY = "entry_key"
    AUTHOR = "author"
    TITLE = "title"
    YEAR = "year"
    VENUE = "venue"
    VOLUME = "volume"
    NUMBER = "number"
    PAGES = "pages"
    DOI = "doi"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Slots evaluated against ground truth (entry_key is always X, but it is
#: still part of the slot set).
ALL_SLOTS = tuple(FieldSlot)

#: The eight ordinary value-bearing slots (everything except the entry type
#: and the citation key).
VALUE_SLOTS = (
    FieldSlot.AUTHOR,
    FieldSlot.TITLE,
    FieldSlot.YEAR,
    FieldSlot.VENUE,
    FieldSlot.VOLUME,
    FieldSlot.NUMBER,
    FieldSlot.PAGES,
    FieldSlot.DOI,
)


class FieldLabel(str, enum.Enum):
    C = "C"  # correct after normalization
    M = "M"  # missing from the entry, present in ground truth
    F = "F"  # fabricated, no verifiable source
    P = "P"  # partial overlap with ground truth
    S = "S"  # substituted from a real but wrong source
    X = "X"  # not applicable / not evaluable

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class BibEntry:
    """One parsed BibTeX record.

    ``entry_type`` and field names are stored lowercase; field order is
    preserved from the source so serialization is deterministic.
    """

    entry_type: str
    citation_key: str
    fields: dict[str, str] = field(default_factory=dict)

    def get(self, name: str) -> str | None:
        return self.fields.get(name.lower())

    def with_fields(self, fields: dict[str, str]) -> "BibEntry":
        return BibEntry(self.entry_type, self.citation_key, dict(fields))


_KEY_RE = re.compile(r"[^A-Za-z0-9]+")


def sanitize_citation_key(key: str) -> str:
    """Strip a citation key down to alphanumerics; empty results become "ref"."""
    cleaned = _KEY_RE.sub("", key)
    return cleaned or "ref"


def parse_entry(text: str) -> BibEntry:
    """Parse exactly one ``@type{key, ...}`` block into a BibEntry."""
    s = text.strip()
    at = s.find("@")
    if at < 0:
        raise BibParseError("no entry found")
    if "@" in s[at + 1 :]:
        # a second @ inside a braced value is fine; a second top-level
        # entry is not, so check after locating the closing brace below
        pass

    m = re.match(r"@\s*([A-Za-z]+)\s*\{", s[at:])
    if not m:
        raise BibParseError("malformed entry header")
    entry_type = m.group(1).lower()
    if entry_type == "string":
        raise UnsupportedConcatenation("@string macros are not supported")
    body_start = at + m.end()

    # find matching close brace for the entry body
    depth = 1
    i = body_start
    while i < len(s):
        c = s[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                break
        i += 1
    if depth != 0:
        raise UnbalancedBraces("entry braces are not balanced")
    body = s[body_start:i]
    trailing = s[i + 1 :].strip()
    if trailing:
        if "@" in trailing:
            raise MultipleEntries("more than one entry in input")
        raise BibParseError(f"trailing content after entry: {trailing[:30]!r}")

    comma = _find_top_level(body, ",")
    if comma < 0:
        key, rest = body.strip(), ""
    else:
        key, rest = body[:comma].strip(), body[comma + 1 :]
    if not key:
        raise EmptyKey("entry has no citation key")

    fields: dict[str, str] = {}
    segments = _split_top_level(rest, ",")
    for position, segment in enumerate(segments):
        seg = segment.strip()
        if not seg:
            if position == len(segments) - 1:
                continue  # tolerate a trailing comma
            raise BibParseError("empty field segment")
        eq = _find_top_level(seg, "=")
        if eq < 0:
            raise BibParseError(f"field without '=': {seg[:30]!r}")
        name = seg[:eq].strip().lower()
        if not name:
            raise BibParseError("field with empty name")
        value = _parse_value(seg[eq + 1 :].strip())
        if name in fields:
            raise DuplicateField(f"duplicate field {name!r}")
        fields[name] = value

    return BibEntry(entry_type=entry_type, citation_key=key, fields=fields)


def _parse_value(raw: str) -> str:
    if not raw:
        return ""
    if raw[0] == "{":
        depth = 0
        for i, c in enumerate(raw):
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    rest = raw[i + 1 :].strip()
                    if rest.startswith("#"):
                        raise UnsupportedConcatenation("'#' concatenation is not supported")
                    if rest:
                        raise BibParseError(f"junk after braced value: {rest[:20]!r}")
                    return raw[1:i]
        raise UnbalancedBraces("value braces are not balanced")
    if raw[0] == '"':
        end = raw.find('"', 1)
        if end < 0:
            raise BibParseError("unterminated quoted value")
        rest = raw[end + 1 :].strip()
        if rest.startswith("#"):
            raise UnsupportedConcatenation("'#' concatenation is not supported")
        if rest:
            raise BibParseError(f"junk after quoted value: {rest[:20]!r}")
        return raw[1:end]
    if "#" in raw:
        raise UnsupportedConcatenation("'#' concatenation is not supported")
    return raw.strip()


def _find_top_level(s: str, ch: str) -> int:
    depth = 0
    in_quote = False
    for i, c in enumerate(s):
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif c == '"' and depth == 0:
            in_quote = not in_quote
        elif c == ch and depth == 0 and not in_quote:
            return i
    return -1


def _split_top_level(s: str, sep: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    in_quote = False
    start = 0
    for i, c in enumerate(s):
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif c == '"' and depth == 0:
            in_quote = not in_quote
        elif c == sep and depth == 0 and not in_quote:
            parts.append(s[start:i])
            start = i + 1
    parts.append(s[start:])
    return parts


def serialize_entry(entry: BibEntry) -> str:
    """Render an entry deterministically: stored field order, braced values."""
    lines = [f"@{entry.entry_type}{{{entry.citation_key},"]
    for name, value in entry.fields.items():
        lines.append(f"  {name} = {{{value}}},")
    lines.append("}")
    return "\n".join(lines)


def split_entries(text: str) -> list[str]:
    """Split a .bib file into individual entry sources (brace-aware)."""
    chunks: list[str] = []
    i = 0
    while i < len(text):
        at = text.find("@", i)
        if at < 0:
            break
        open_brace = text.find("{", at)
        if open_brace < 0:
            break
        depth = 0
        j = open_brace
        while j < len(text):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if depth != 0:
            raise UnbalancedBraces("unbalanced braces in .bib input")
        chunks.append(text[at : j + 1])
        i = j + 1
    return chunks


def parse_bib_file(text: str) -> list[BibEntry]:
    return [parse_entry(chunk) for chunk in split_entries(text)]


def slot_of(entry: BibEntry, slot: FieldSlot) -> str | None:
    """Raw field value backing a slot, or None.

    The venue slot is virtual: journal wins over booktitle when both exist.
    """
    if slot is FieldSlot.ENTRY_TYPE:
        return entry.entry_type
    if slot is FieldSlot.ENTRY_KEY:
        return entry.citation_key
    if slot is FieldSlot.VENUE:
        journal = entry.get("journal")
        if journal is not None:
            return journal
        return entry.get("booktitle")
    return entry.get(slot.value)
