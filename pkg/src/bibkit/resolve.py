"""Deterministic query resolution against a translation server.

Queries are classified (DOI > arXiv ID > PMID > ISBN > URL > title) and
routed: URLs to the server's /web endpoint, everything else to /search.
An empty /search response falls back to the CrossRef works API (up to 10
candidates). Identifier queries must yield exactly one record; title
queries are validated against the winner with a 0.85 token-overlap gate.

All upstream traffic goes through a transport seam so the module can be
exercised offline against recorded fixtures.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol
from urllib.parse import urlparse, urlunparse

from .model import BibEntry, BibParseError, parse_entry, sanitize_citation_key
from .normalize import jaccard, normalize_doi, tokenize_filtered

#: Jaccard threshold validating a title-query winner against the query.
TITLE_MATCH_THRESHOLD = 0.85

#: Maximum candidates taken from the CrossRef fallback.
CROSSREF_MAX_CANDIDATES = 10


class ResolveError(Exception):
    pass


class EmptyQuery(ResolveError):
    pass


class MalformedUrl(ResolveError):
    pass


class NoCandidates(ResolveError):
    pass


class UpstreamUnavailable(ResolveError):
    pass


class ExportFailure(ResolveError):
    """Server export produced unparseable BibTeX; raw text is retained."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class Query:
    kind: str  # doi | arxiv_id | isbn | pmid | url | title
    value: str
    original: str


IDENTIFIER_KINDS = frozenset({"doi", "arxiv_id", "isbn", "pmid"})


@dataclass
class ResolutionResult:
    status: str  # found | not_found | title_mismatch
    candidates: list[tuple[str, float]] = field(default_factory=list)
    bibtex: BibEntry | None = None
    source: str | None = None  # search_endpoint | web_endpoint | crossref_fallback


_DOI_RE = re.compile(r"^(?:doi:\s*)?(10\.\d{4,9}/\S+)$", re.IGNORECASE)
_ARXIV_NEW_RE = re.compile(r"^(?:arxiv:\s*)?(\d{4}\.\d{4,5}(?:v\d+)?)$", re.IGNORECASE)
_ARXIV_OLD_RE = re.compile(r"^(?:arxiv:\s*)?([a-z-]+(?:\.[A-Za-z]{2})?/\d{7}(?:v\d+)?)$")
_PMID_RE = re.compile(r"^(?:pmid:?\s*)?(\d{1,8})$", re.IGNORECASE)
_ISBN_RE = re.compile(r"^(?:isbn:?\s*)?([\d -]{9,16}[\dXx])$", re.IGNORECASE)
_ARXIV_ID_SHAPE_RE = re.compile(r"^\d{4}\.\d{4,5}(?:v\d+)?$")


def classify_query(raw: str) -> Query:
    """Classify raw input; DOI-style URLs are rerouted as DOI queries."""
    s = raw.strip()
    if not s:
        raise EmptyQuery("empty query")
    m = _DOI_RE.match(s)
    if m:
        return Query("doi", normalize_doi(m.group(1)), raw)
    if s.lower().startswith(("http://", "https://")):
        parsed = urlparse(s)
        host = parsed.netloc.lower().removeprefix("www.")
        if host in ("doi.org", "dx.doi.org"):
            return Query("doi", normalize_doi(parsed.path.lstrip("/")), raw)
        return Query("url", normalize_url(s), raw)
    m = _ARXIV_NEW_RE.match(s) or _ARXIV_OLD_RE.match(s)
    if m:
        return Query("arxiv_id", m.group(1), raw)
    m = _PMID_RE.match(s)
    if m:
        return Query("pmid", m.group(1), raw)
    m = _ISBN_RE.match(s)
    if m:
        digits = re.sub(r"[ -]", "", m.group(1))
        if len(digits) in (10, 13):
            return Query("isbn", digits.upper(), raw)
    return Query("title", s, raw)


_ARXIV_PDF_RE = re.compile(r"^/pdf/(.+?)(?:\.pdf)?$")
_ARXIV_HTML_RE = re.compile(r"^/html/(.+)$")
_HF_PAPER_RE = re.compile(r"^/papers/([^/]+)/?$")


def normalize_url(url: str) -> str:
    """Rewrite arXiv PDF/HTML, alphaxiv, and HuggingFace paper links.

    All rewrites are pure string transformations; no network calls.
    """
    parsed = urlparse(url.strip())
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise MalformedUrl(f"not an absolute http(s) URL: {url!r}")
    host = parsed.netloc.lower().removeprefix("www.")

    if host.endswith("alphaxiv.org"):
        parsed = parsed._replace(netloc="arxiv.org")
        host = "arxiv.org"
    if host == "huggingface.co":
        m = _HF_PAPER_RE.match(parsed.path)
        if m and _ARXIV_ID_SHAPE_RE.match(m.group(1)):
            return f"https://arxiv.org/abs/{m.group(1)}"
        return url
    if host == "arxiv.org":
        m = _ARXIV_PDF_RE.match(parsed.path) or _ARXIV_HTML_RE.match(parsed.path)
        if m:
            parsed = parsed._replace(path=f"/abs/{m.group(1)}", query="", fragment="")
        return urlunparse(parsed._replace(netloc="arxiv.org"))
    return url


def rank_candidates(query_text: str, candidates: list[str]) -> list[tuple[str, float]]:
    """Jaccard-scored ranking with a substring tiebreaker.

    A single candidate is passed through unmodified (score computed but
    not used for selection).
    """
    if not candidates:
        raise NoCandidates("no candidates to rank")
    query_tokens = tokenize_filtered(query_text)
    q_lower = query_text.lower()
    scored = []
    for index, title in enumerate(candidates):
        score = jaccard(query_tokens, tokenize_filtered(title))
        t_lower = title.lower()
        substring = q_lower in t_lower or t_lower in q_lower
        scored.append((title, score, substring, index))
    if len(scored) == 1:
        title, score, _, _ = scored[0]
        return [(title, score)]
    scored.sort(key=lambda item: (-item[1], not item[2], item[3]))
    return [(title, score) for title, score, _, _ in scored]


# --------------------------------------------------------------------------
# transport seam


@dataclass
class TransportResponse:
    status: int
    body: str
    headers: dict[str, str] = field(default_factory=dict)


class TransportError(Exception):
    """Network-level failure (connection refused, timeout)."""


class Transport(Protocol):
    def request(
        self,
        method: str,
        url: str,
        *,
        params: dict[str, str] | None = None,
        body: str | None = None,
        headers: dict[str, str] | None = None,
    ) -> TransportResponse: ...


class HttpTransport:
    """Live transport backed by requests."""

    def __init__(self, timeout: float = 30.0):
        import requests

        self._session = requests.Session()
        self._timeout = timeout

    def request(self, method, url, *, params=None, body=None, headers=None):
        import requests

        try:
            resp = self._session.request(
                method,
                url,
                params=params,
                data=body.encode("utf-8") if body is not None else None,
                headers=headers,
                timeout=self._timeout,
                allow_redirects=False,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        return TransportResponse(resp.status_code, resp.text, dict(resp.headers))


def _exchange_key(method, url, params, body):
    return (method.upper(), url, tuple(sorted((params or {}).items())), body or "")


class ReplayTransport:
    """Replays recorded exchanges from a fixture file; read-only."""

    def __init__(self, source: str | Path | dict):
        if isinstance(source, dict):
            doc = source
        else:
            doc = json.loads(Path(source).read_text("utf-8"))
        self._exchanges = list(doc["exchanges"])
        self._used = [False] * len(self._exchanges)

    def request(self, method, url, *, params=None, body=None, headers=None):
        key = _exchange_key(method, url, params, body)
        for i, exchange in enumerate(self._exchanges):
            if self._used[i]:
                continue
            req = exchange["request"]
            if _exchange_key(req["method"], req["url"], req.get("params"), req.get("body")) == key:
                self._used[i] = True
                resp = exchange["response"]
                return TransportResponse(resp["status"], resp.get("body", ""), resp.get("headers", {}))
        raise TransportError(f"no recorded exchange for {method} {url} body={body!r}")


class RecordingTransport:
    """Wraps a live transport and captures exchanges for later replay."""

    def __init__(self, inner: Transport):
        self._inner = inner
        self.exchanges: list[dict] = []

    def request(self, method, url, *, params=None, body=None, headers=None):
        resp = self._inner.request(method, url, params=params, body=body, headers=headers)
        self.exchanges.append(
            {
                "request": {"method": method, "url": url, "params": params or {}, "body": body or ""},
                "response": {"status": resp.status, "headers": resp.headers, "body": resp.body},
            }
        )
        return resp

    def save(self, path: str | Path) -> None:
        doc = {"format_version": 1, "exchanges": self.exchanges}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), "utf-8")


class RateLimiter:
    """Serializes request starts at a fixed minimum spacing.

    Strict spacing (1/rate seconds between consecutive starts) guarantees
    both properties the client promises: at most ``rate`` starts in any
    one-second window, and N sequential requests take at least
    (N-1)/rate seconds. A bursty bucket would violate the window bound.
    """

    def __init__(
        self,
        rate_per_sec: float = 2.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.min_interval = 1.0 / rate_per_sec
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_start: float | None = None
        self.starts: list[float] = []

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            start = now if self._next_start is None else max(now, self._next_start)
            self._next_start = start + self.min_interval
            delay = start - now
        if delay > 0:
            self._sleep(delay)
        self.starts.append(start)


@dataclass
class ResolverConfig:
    base_url: str
    crossref_url: str = "https://api.crossref.org"
    contact: str | None = None
    retry_delay: float = 1.0
    rate_per_sec: float = 2.0

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "ResolverConfig":
        env = os.environ if env is None else env
        base = env.get("BIBKIT_SERVER_URL", "http://127.0.0.1:1969")
        return cls(base_url=base, contact=env.get("BIBKIT_CONTACT"))


@dataclass
class Candidate:
    title: str
    year: str | None = None
    doi: str | None = None
    venue: str | None = None
    authors: str | None = None
    item: dict | None = None  # server JSON item, when the server produced it


class Resolver:
    """Shareable client; the rate limiter is the only cross-call state."""

    def __init__(
        self,
        config: ResolverConfig,
        transport: Transport | None = None,
        rate_limiter: RateLimiter | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.transport = transport or HttpTransport()
        self.rate_limiter = rate_limiter or RateLimiter(config.rate_per_sec)
        self._sleep = sleep

    # -- low-level ---------------------------------------------------------

    def _request(self, method, url, *, params=None, body=None, headers=None) -> TransportResponse:
        attempts = 0
        while True:
            attempts += 1
            self.rate_limiter.acquire()
            try:
                resp = self.transport.request(method, url, params=params, body=body, headers=headers)
            except TransportError as exc:
                if attempts >= 2:
                    raise UpstreamUnavailable(str(exc)) from exc
                self._sleep(self.config.retry_delay)
                continue
            if resp.status >= 500:
                if attempts >= 2:
                    raise UpstreamUnavailable(f"upstream returned {resp.status}")
                self._sleep(self.config.retry_delay)
                continue
            return resp

    def _server_lookup(self, endpoint: str, payload: str) -> list[dict]:
        """POST to /search or /web; returns candidate items ([] when none)."""
        resp = self._request(
            "POST",
            f"{self.config.base_url}/{endpoint}",
            body=payload,
            headers={"Content-Type": "text/plain"},
        )
        if resp.status in (404, 501):
            return []
        if resp.status not in (200, 300):
            return []
        if not resp.body.strip():
            return []
        try:
            items = json.loads(resp.body)
        except json.JSONDecodeError:
            return []
        if isinstance(items, dict):
            items = [items]
        return [item for item in items if isinstance(item, dict)]

    def _export_bibtex(self, items: list[dict]) -> BibEntry:
        resp = self._request(
            "POST",
            f"{self.config.base_url}/export",
            params={"format": "bibtex"},
            body=json.dumps(items, sort_keys=True),
            headers={"Content-Type": "application/json"},
        )
        raw = resp.body
        try:
            entry = parse_entry(raw)
        except BibParseError as exc:
            raise ExportFailure(f"unparseable BibTeX from export: {exc}", raw=raw) from exc
        return BibEntry(entry.entry_type, sanitize_citation_key(entry.citation_key), entry.fields)

    # -- public ------------------------------------------------------------

    def crossref_fallback(self, text: str) -> list[Candidate]:
        """Up to 10 candidates from the CrossRef works API, in API order."""
        headers = {}
        if self.config.contact:
            headers["User-Agent"] = f"bibkit/0.1 (mailto:{self.config.contact})"
        resp = self._request(
            "GET",
            f"{self.config.crossref_url}/works",
            params={"query": text, "rows": str(CROSSREF_MAX_CANDIDATES)},
            headers=headers or None,
        )
        if resp.status != 200:
            return []
        try:
            message = json.loads(resp.body).get("message", {})
        except json.JSONDecodeError:
            return []
        candidates = []
        for hit in message.get("items", [])[:CROSSREF_MAX_CANDIDATES]:
            titles = hit.get("title") or []
            if not titles:
                continue
            year = None
            issued = (hit.get("issued") or {}).get("date-parts") or []
            if issued and issued[0]:
                year = str(issued[0][0])
            containers = hit.get("container-title") or []
            parts = []
            for a in hit.get("author") or []:
                if a.get("family") and a.get("given"):
                    parts.append(f"{a['family']}, {a['given']}")
                elif a.get("family"):
                    parts.append(a["family"])
            authors = " and ".join(parts) if parts else None
            candidates.append(
                Candidate(
                    title=titles[0],
                    year=year,
                    doi=hit.get("DOI"),
                    venue=containers[0] if containers else None,
                    authors=authors,
                )
            )
        return candidates

    def resolve_query(self, q: Query) -> ResolutionResult:
        endpoint = "web" if q.kind == "url" else "search"
        source = "web_endpoint" if q.kind == "url" else "search_endpoint"
        items = self._server_lookup(endpoint, q.value)

        if items:
            return self._finish_from_items(q, items, source)

        if endpoint == "web":
            return ResolutionResult(status="not_found", source=source)

        fallback = self.crossref_fallback(q.original)
        if not fallback:
            return ResolutionResult(status="not_found", source="crossref_fallback")
        return self._finish_from_fallback(q, fallback)

    # -- selection ---------------------------------------------------------

    def _finish_from_items(self, q: Query, items: list[dict], source: str) -> ResolutionResult:
        titles = [str(item.get("title", "")) for item in items]
        if q.kind in IDENTIFIER_KINDS:
            if len(items) != 1:
                # deterministic resolution never picks among alternatives
                return ResolutionResult(
                    status="not_found",
                    candidates=[(t, 1.0) for t in titles],
                    source=source,
                )
            entry = self._export_bibtex(items)
            return ResolutionResult(
                status="found", candidates=[(titles[0], 1.0)], bibtex=entry, source=source
            )

        ranked = rank_candidates(q.value, titles)
        winner_title = ranked[0][0]
        winner_item = items[titles.index(winner_title)]
        if q.kind == "title":
            score = jaccard(tokenize_filtered(q.value), tokenize_filtered(winner_title))
            if score < TITLE_MATCH_THRESHOLD:
                return ResolutionResult(status="title_mismatch", candidates=ranked, source=source)
        entry = self._export_bibtex([winner_item])
        return ResolutionResult(status="found", candidates=ranked, bibtex=entry, source=source)

    def _finish_from_fallback(self, q: Query, fallback: list[Candidate]) -> ResolutionResult:
        titles = [c.title for c in fallback]
        if q.kind in IDENTIFIER_KINDS:
            if len(fallback) != 1:
                return ResolutionResult(
                    status="not_found",
                    candidates=[(t, 1.0) for t in titles],
                    source="crossref_fallback",
                )
            chosen = fallback[0]
            ranked = [(chosen.title, 1.0)]
        else:
            ranked = rank_candidates(q.value, titles)
            chosen = fallback[titles.index(ranked[0][0])]
            if q.kind == "title":
                score = jaccard(tokenize_filtered(q.value), tokenize_filtered(chosen.title))
                if score < TITLE_MATCH_THRESHOLD:
                    return ResolutionResult(
                        status="title_mismatch", candidates=ranked, source="crossref_fallback"
                    )
        entry = _entry_from_candidate(chosen)
        return ResolutionResult(
            status="found", candidates=ranked, bibtex=entry, source="crossref_fallback"
        )

    def resolve(self, raw: str) -> ResolutionResult:
        return self.resolve_query(classify_query(raw))


def _entry_from_candidate(c: Candidate) -> BibEntry:
    fields: dict[str, str] = {"title": c.title}
    if c.authors:
        fields["author"] = c.authors
    if c.venue:
        fields["journal"] = c.venue
    if c.year:
        fields["year"] = c.year
    if c.doi:
        fields["doi"] = c.doi
    key_seed = (c.authors or c.title).split(",")[0].split()[-1] + (c.year or "")
    return BibEntry("article", sanitize_citation_key(key_seed), fields)
