import pytest

from bibkit.resolve import (
    Candidate,
    EmptyQuery,
    MalformedUrl,
    NoCandidates,
    RateLimiter,
    ReplayTransport,
    Resolver,
    ResolverConfig,
    TransportError,
    TransportResponse,
    UpstreamUnavailable,
    classify_query,
    normalize_url,
    rank_candidates,
)

from conftest import FIXTURES


def make_resolver(fixture_name: str) -> Resolver:
    config = ResolverConfig(
        base_url="http://server.test",
        crossref_url="http://crossref.test",
        retry_delay=0.0,
    )
    transport = ReplayTransport(FIXTURES / fixture_name)
    limiter = RateLimiter(rate_per_sec=2.0, clock=lambda: 0.0, sleep=lambda s: None)
    return Resolver(config, transport=transport, rate_limiter=limiter, sleep=lambda s: None)


# -- query classification ----------------------------------------------------


@pytest.mark.parametrize(
    "raw,kind,value",
    [
        ("10.1111/iju.13054", "doi", "10.1111/iju.13054"),
        ("doi:10.1111/IJU.13054", "doi", "10.1111/iju.13054"),
        ("https://doi.org/10.1162/TACL.a.611", "doi", "10.1162/tacl.a.611"),
        ("https://dx.doi.org/10.1038/s41586-020-1234-5", "doi", "10.1038/s41586-020-1234-5"),
        ("2510.16227", "arxiv_id", "2510.16227"),
        ("arXiv:2510.16227v2", "arxiv_id", "2510.16227v2"),
        ("cs.LG/0701001", "arxiv_id", "cs.LG/0701001"),
        ("12345678", "pmid", "12345678"),
        ("pmid:998877", "pmid", "998877"),
        ("978-0-13-468599-1", "isbn", "9780134685991"),
        ("0-13-468599-5", "isbn", "0134685995"),
        ("https://arxiv.org/pdf/2510.16227", "url", "https://arxiv.org/abs/2510.16227"),
        ("Learning to Discover Social Circles in Ego Networks", "title", "Learning to Discover Social Circles in Ego Networks"),
    ],
)
def test_classify_query(raw, kind, value):
    q = classify_query(raw)
    assert (q.kind, q.value) == (kind, value)
    assert q.original == raw


def test_classify_query_empty():
    with pytest.raises(EmptyQuery):
        classify_query("   ")


def test_classify_query_precedence_doi_over_title():
    assert classify_query("10.1000/some words here").kind == "title"  # DOI has no spaces
    assert classify_query("10.1000/j.123").kind == "doi"


# -- URL normalization -------------------------------------------------------


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("https://arxiv.org/pdf/2510.16227", "https://arxiv.org/abs/2510.16227"),
        ("https://arxiv.org/pdf/2510.16227.pdf", "https://arxiv.org/abs/2510.16227"),
        ("https://arxiv.org/html/2510.16227", "https://arxiv.org/abs/2510.16227"),
        ("https://www.alphaxiv.org/abs/2510.16227", "https://arxiv.org/abs/2510.16227"),
        ("https://huggingface.co/papers/2510.16227", "https://arxiv.org/abs/2510.16227"),
        ("https://huggingface.co/papers/not-an-id", "https://huggingface.co/papers/not-an-id"),
        ("https://example.org/paper/42", "https://example.org/paper/42"),
    ],
)
def test_normalize_url(raw, expected):
    assert normalize_url(raw) == expected


def test_normalize_url_malformed():
    with pytest.raises(MalformedUrl):
        normalize_url("not a url")


# -- candidate ranking -------------------------------------------------------


def test_rank_exact_match_first():
    ranked = rank_candidates(
        "graph neural networks survey",
        ["Unrelated Title Entirely", "Graph Neural Networks Survey"],
    )
    assert ranked[0] == ("Graph Neural Networks Survey", 1.0)


def test_rank_substring_tiebreak():
    # both candidates share the same token set with the query; only one
    # contains the query verbatim
    query = "social circles"
    # stopwords keep both token sets identical to the query's, so the
    # jaccard scores tie; only the second contains the query verbatim
    candidates = ["circles by social", "the social circles"]
    ranked = rank_candidates(query, candidates)
    scores = [s for _, s in ranked]
    assert scores[0] == scores[1]
    assert ranked[0][0] == "the social circles"


def test_rank_stable_order_on_full_tie():
    ranked = rank_candidates("query tokens", ["first candidate", "second candidate"])
    assert [t for t, _ in ranked] == ["first candidate", "second candidate"]


def test_rank_single_candidate_pass_through():
    ranked = rank_candidates("anything at all", ["Completely Different"])
    assert len(ranked) == 1
    assert ranked[0][0] == "Completely Different"


def test_rank_empty_raises():
    with pytest.raises(NoCandidates):
        rank_candidates("q", [])


# -- replay resolution -------------------------------------------------------


def test_doi_query_found_via_search():
    result = make_resolver("replay_doi_found.json").resolve("10.1111/iju.13054")
    assert result.status == "found"
    assert result.source == "search_endpoint"
    assert len(result.candidates) == 1
    assert result.bibtex is not None
    assert result.bibtex.citation_key == "yamashita2016"  # sanitized
    assert result.bibtex.get("doi") == "10.1111/iju.13054"


def test_doi_query_fallback_many_hits_not_found():
    result = make_resolver("replay_fallback_many.json").resolve("10.9999/unknown.1")
    assert result.status == "not_found"
    assert result.source == "crossref_fallback"
    assert len(result.candidates) == 10  # 12 hits capped to 10
    assert result.bibtex is None


def test_doi_query_fallback_empty_not_found():
    result = make_resolver("replay_fallback_empty.json").resolve("10.9999/unknown.2")
    assert result.status == "not_found"
    assert result.candidates == []
    assert result.bibtex is None


def test_doi_query_fallback_single_hit_found():
    result = make_resolver("replay_fallback_single.json").resolve("10.9999/unknown.3")
    assert result.status == "found"
    assert result.source == "crossref_fallback"
    assert result.bibtex.get("journal") == "Journal of Clinical Oncology"
    assert result.bibtex.get("year") == "2016"
    assert result.bibtex.get("author") == "Yamashita, Shinichi"


def test_title_query_mismatch_gate():
    result = make_resolver("replay_title_mismatch.json").resolve("alpha beta gamma delta")
    assert result.status == "title_mismatch"
    assert result.bibtex is None
    assert result.candidates[0] == ("alpha beta epsilon", 0.4)


def test_title_query_found():
    result = make_resolver("replay_title_found.json").resolve(
        "Learning to Discover Social Circles in Ego Networks"
    )
    assert result.status == "found"
    assert result.bibtex.entry_type == "inproceedings"
    assert result.bibtex.get("pages") == "548--556"


def test_url_query_uses_web_endpoint():
    result = make_resolver("replay_web_found.json").resolve("https://arxiv.org/pdf/2510.16227")
    assert result.status == "found"
    assert result.source == "web_endpoint"
    assert result.bibtex.get("doi") == "10.48550/arXiv.2510.16227"


def test_determinism_same_fixture_same_result():
    first = make_resolver("replay_doi_found.json").resolve("10.1111/iju.13054")
    second = make_resolver("replay_doi_found.json").resolve("10.1111/iju.13054")
    assert first == second


# -- retry and failure handling ---------------------------------------------


class FlakyTransport:
    def __init__(self, failures: int, response: TransportResponse):
        self.failures = failures
        self.response = response
        self.calls = 0

    def request(self, method, url, *, params=None, body=None, headers=None):
        self.calls += 1
        if self.calls <= self.failures:
            raise TransportError("connection refused")
        return self.response

    def reset(self):
        self.calls = 0


def quiet_resolver(transport) -> Resolver:
    config = ResolverConfig(base_url="http://server.test", retry_delay=0.0)
    limiter = RateLimiter(rate_per_sec=2.0, clock=lambda: 0.0, sleep=lambda s: None)
    return Resolver(config, transport=transport, rate_limiter=limiter, sleep=lambda s: None)


def test_one_retry_then_success():
    transport = FlakyTransport(1, TransportResponse(200, "[]"))
    resolver = quiet_resolver(transport)
    assert resolver._server_lookup("search", "anything") == []
    assert transport.calls == 2


def test_two_failures_raise_upstream_unavailable():
    transport = FlakyTransport(2, TransportResponse(200, "[]"))
    resolver = quiet_resolver(transport)
    with pytest.raises(UpstreamUnavailable):
        resolver._server_lookup("search", "anything")


class AlwaysStatus:
    def __init__(self, status):
        self.status = status

    def request(self, method, url, *, params=None, body=None, headers=None):
        return TransportResponse(self.status, "oops")


def test_5xx_twice_raises_upstream_unavailable():
    with pytest.raises(UpstreamUnavailable):
        quiet_resolver(AlwaysStatus(503))._server_lookup("search", "x")


def test_404_returns_no_items():
    assert quiet_resolver(AlwaysStatus(404))._server_lookup("search", "x") == []


# -- rate limiter ------------------------------------------------------------


class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.now += seconds


def test_rate_limiter_spacing():
    clock = FakeClock()
    limiter = RateLimiter(rate_per_sec=2.0, clock=clock, sleep=clock.sleep)
    for _ in range(6):
        limiter.acquire()
    starts = limiter.starts
    assert len(starts) == 6
    for a, b in zip(starts, starts[1:]):
        assert b - a >= 0.5 - 1e-9
    assert starts[-1] - starts[0] >= 2.5 - 1e-9


def test_rate_limiter_window_bound():
    clock = FakeClock()
    limiter = RateLimiter(rate_per_sec=2.0, clock=clock, sleep=clock.sleep)
    for _ in range(10):
        limiter.acquire()
    starts = limiter.starts
    for i, t in enumerate(starts):
        in_window = [s for s in starts if t <= s < t + 1.0]
        assert len(in_window) <= 2, (i, in_window)


def test_rate_limiter_no_delay_when_idle():
    clock = FakeClock()
    limiter = RateLimiter(rate_per_sec=2.0, clock=clock, sleep=clock.sleep)
    limiter.acquire()
    clock.now = 10.0
    limiter.acquire()
    assert limiter.starts[1] == 10.0


# -- crossref candidate mapping ----------------------------------------------


def test_crossref_candidate_shape():
    resolver = make_resolver("replay_fallback_many.json")
    resolver._server_lookup("search", "10.9999/unknown.1")  # consume exchange 1
    candidates = resolver.crossref_fallback("10.9999/unknown.1")
    assert len(candidates) == 10
    first = candidates[0]
    assert isinstance(first, Candidate)
    assert first.title == "Candidate Paper Number 00 on Record Linkage"
    assert first.year == "2015"
    assert first.doi == "10.5555/cand.00"
    assert first.venue == "Journal of Examples"
    assert first.authors == "Example, Writer 00"
