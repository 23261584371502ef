"""Per-field normalization rules and token-similarity primitives.

Every normalizer is idempotent and pure. The stopword list and the default
venue synonym table are shipped as data files so gate decisions stay
reproducible across runs.
"""

from __future__ import annotations

import re
import unicodedata
from importlib import resources
from pathlib import Path


class EmptyAuthor(ValueError):
    pass


class MalformedPages(ValueError):
    pass


class MalformedYear(ValueError):
    pass


def _load_stopwords() -> frozenset[str]:
    text = resources.files("bibkit.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


STOPWORDS = _load_stopwords()

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize_filtered(text: str) -> frozenset[str]:
    """Lowercase alphanumeric tokens minus stopwords and 1-char tokens."""
    tokens = _TOKEN_RE.findall(text.lower())
    return frozenset(t for t in tokens if len(t) > 1 and t not in STOPWORDS)


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    """|a ∩ b| / |a ∪ b|; two empty sets are treated as identical (1.0)."""
    if not a and not b:
        return 1.0
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def fold_diacritics(value: str) -> str:
    """Decompose unicode and drop combining marks; unmappable chars are dropped."""
    decomposed = unicodedata.normalize("NFKD", value)
    return "".join(c for c in decomposed if not unicodedata.combining(c) and ord(c) < 128)


_ET_AL_RE = re.compile(r"\bet\.?\s+al\.?\s*$", re.IGNORECASE)


def _split_top_level_and(value: str) -> list[str]:
    """Split an author field on the literal separator " and " at brace depth 0."""
    parts: list[str] = []
    depth = 0
    i = 0
    start = 0
    lowered = value.lower()
    while i < len(value):
        c = value[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif depth == 0 and lowered.startswith(" and ", i):
            parts.append(value[start:i])
            i += 5
            start = i
            continue
        i += 1
    parts.append(value[start:])
    return [p.strip() for p in parts if p.strip()]


def _split_authors(value: str) -> list[str]:
    """Author names from a raw field.

    The BibTeX convention separates authors with " and ". Generated entries
    sometimes use a plain comma-separated display list instead
    ("Julian McAuley, Jure Leskovec"); we detect that case by checking that
    every comma-separated segment looks like a full name (more than one word
    and no braces), since a single comma in "Last, First" has a one-word
    surname segment.
    """
    value = _ET_AL_RE.sub("", value).strip().rstrip(",")
    if not value:
        raise EmptyAuthor("empty author field")
    parts = _split_top_level_and(value)
    if len(parts) > 1:
        return parts
    segments = [s.strip() for s in value.split(",") if s.strip()]
    if len(segments) > 1 and all("{" not in s and len(s.split()) > 1 for s in segments):
        return segments
    return [value]


def _last_name(name: str) -> str:
    """Lowercased, diacritic-folded surname of one author name."""
    name = name.strip()
    if "," in name and not name.startswith("{"):
        surname = name.split(",", 1)[0]
    elif name.startswith("{"):
        end = name.find("}")
        surname = name[1:end] if end > 0 else name.strip("{}")
    else:
        words = name.split()
        surname = words[-1] if words else ""
        # unbraced "van der Berg" style: keep trailing lowercase particles
        # attached only when the name ends with them; last word is enough
        # for the conventions this toolkit evaluates
    folded = fold_diacritics(surname).lower()
    return re.sub(r"[^a-z0-9]", "", folded)


def normalize_author(value: str) -> str:
    """First-author last name, lowercase, diacritics stripped."""
    names = _split_authors(value)
    last = _last_name(names[0])
    if not last:
        raise EmptyAuthor("could not extract a first-author last name")
    return last


def author_lastname_list(value: str) -> list[str]:
    """Ordered lowercase last names, one per author."""
    names = _split_authors(value)
    result = [ln for ln in (_last_name(n) for n in names) if ln]
    if not result:
        raise EmptyAuthor("no author last names found")
    return result


_LATEX_CMD_RE = re.compile(r"\\[a-zA-Z]+\*?")


def normalize_title(value: str) -> str:
    """Lowercase, LaTeX commands and braces removed, whitespace collapsed."""
    s = _LATEX_CMD_RE.sub(" ", value)
    s = s.replace("{", "").replace("}", "").replace("\\", " ")
    s = re.sub(r"\s+", " ", s).strip()
    return s.lower()


class VenueSynonymTable:
    """Canonical venue name -> known variants; lookup is case-insensitive.

    File format: one record per line, canonical name, tab, pipe-separated
    variants (UTF-8). Every canonical name is implicitly its own variant.
    """

    def __init__(self, mapping: dict[str, set[str]] | None = None):
        self._canonical_of: dict[str, str] = {}
        self.variant_count = 0
        for canonical, variants in (mapping or {}).items():
            self.add(canonical, variants)

    @staticmethod
    def _fold(value: str) -> str:
        return re.sub(r"\s+", " ", value).strip().lower()

    def add(self, canonical: str, variants: set[str] | list[str]) -> None:
        canon_form = self._fold(canonical)
        for variant in set(variants) | {canonical}:
            key = self._fold(variant)
            existing = self._canonical_of.get(key)
            if existing is not None and existing != canon_form:
                raise ValueError(f"variant {variant!r} already maps to {existing!r}")
            if key not in self._canonical_of:
                self._canonical_of[key] = canon_form
                self.variant_count += 1

    def lookup(self, value: str) -> str | None:
        return self._canonical_of.get(self._fold(value))

    @classmethod
    def from_file(cls, path: str | Path) -> "VenueSynonymTable":
        table = cls()
        for line in Path(path).read_text("utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            canonical, _, variants = line.partition("\t")
            table.add(canonical, [v for v in variants.split("|") if v.strip()])
        return table

    @classmethod
    def default(cls) -> "VenueSynonymTable":
        with resources.as_file(resources.files("bibkit.data").joinpath("venues.tsv")) as p:
            return cls.from_file(p)


def normalize_venue(value: str, table: VenueSynonymTable | None = None) -> str:
    """Canonical venue name via the synonym table, else the folded input."""
    folded = re.sub(r"\s+", " ", value).strip().lower()
    if table is not None:
        hit = table.lookup(value)
        if hit is not None:
            return hit
    return folded


_DOI_PREFIX_RE = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:\s*)", re.IGNORECASE)


def normalize_doi(value: str) -> str:
    """Bare lowercase DOI with URL and "doi:" prefixes stripped."""
    s = value.strip()
    while True:
        stripped = _DOI_PREFIX_RE.sub("", s)
        if stripped == s:
            break
        s = stripped
    return s.lower()


_PAGE_SEP_RE = re.compile(r"\s*(?:-{1,3}|\u2013|\u2014)\s*")
_PAGE_PART_RE = re.compile(r"^[A-Za-z0-9_.:]+$")


def normalize_pages(value: str) -> str:
    """Canonical "start--end" (or a single page), any dash style accepted."""
    s = value.strip()
    if not s:
        raise MalformedPages("empty pages value")
    parts = [p for p in _PAGE_SEP_RE.split(s)]
    if len(parts) == 1:
        if not _PAGE_PART_RE.match(parts[0]):
            raise MalformedPages(f"unparseable pages value: {value!r}")
        return parts[0]
    if len(parts) != 2 or not all(parts):
        raise MalformedPages(f"unparseable pages value: {value!r}")
    if not any(_PAGE_PART_RE.match(p) for p in parts):
        raise MalformedPages(f"unparseable pages value: {value!r}")
    if parts[0] == parts[1]:
        # degenerate ranges ("426--426") are the same citation as the bare page
        return parts[0]
    return f"{parts[0]}--{parts[1]}"


_YEAR_RE = re.compile(r"^\d{4}$")


def normalize_year(value: str) -> str:
    """The 4-digit year, or MalformedYear."""
    s = value.strip()
    if not _YEAR_RE.match(s):
        raise MalformedYear(f"not a 4-digit year: {value!r}")
    return s
