"""Archive ingestion: month index fetching, article scraping, chunk merging.

All network traffic flows through an injected transport object and all
waiting flows through injected clock/sleep callables, so every path here is
testable offline with recorded responses and a fake clock. The client
enforces a minimum delay between any two live requests; the archive API is
aggressive about rate limits.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Protocol
from urllib.parse import urlparse

from .cleaning import normalize_ws
from .corpus import (
    CorpusManifest,
    ManifestRow,
    encode_decade,
    load_manifest,
    save_manifest,
    write_raw_article,
)
from .errors import (
    AuthError,
    DuplicateId,
    InvalidUrl,
    MalformedIndex,
    RateLimited,
    TransportError,
)

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.nytimes.com/svc/archive/v1"
API_KEY_ENV = "CHRONOTEXT_API_KEY"


@dataclass(frozen=True)
class HttpResponse:
    status: int
    body: bytes


class Transport(Protocol):
    def get(self, url: str, timeout_s: float) -> HttpResponse: ...


class UrllibTransport:
    """Live HTTP GET via urllib; failures surface as exceptions."""

    def get(self, url: str, timeout_s: float) -> HttpResponse:
        import urllib.error
        import urllib.request

        request = urllib.request.Request(
            url, headers={"User-Agent": "chronotext/0.1"}
        )
        try:
            with urllib.request.urlopen(request, timeout=timeout_s) as resp:
                return HttpResponse(resp.status, resp.read())
        except urllib.error.HTTPError as exc:
            return HttpResponse(exc.code, exc.read())


@dataclass(frozen=True)
class FetchPolicy:
    delay_ms: int = 12000
    max_retries: int = 3
    timeout_ms: int = 30000

    def __post_init__(self) -> None:
        if self.delay_ms < 0:
            raise ValueError(f"delay_ms must be >= 0, got {self.delay_ms}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.timeout_ms <= 0:
            raise ValueError(f"timeout_ms must be > 0, got {self.timeout_ms}")


@dataclass(frozen=True)
class MonthRef:
    year: int
    month: int

    def __post_init__(self) -> None:
        encode_decade(self.year)
        if not 1 <= self.month <= 12:
            raise ValueError(f"month {self.month} outside [1, 12]")


@dataclass(frozen=True)
class IndexEntry:
    url: str
    year: int
    month: int
    raw_category: str


@dataclass(frozen=True)
class ScrapeResult:
    url: str
    status: str  # ok | fetch_failed | extract_failed
    text: str = ""


class ArchiveClient:
    """Rate-limited GET wrapper shared by index fetching and scraping."""

    def __init__(
        self,
        transport: Transport,
        policy: FetchPolicy | None = None,
        clock: Callable[[], float] | None = None,
        sleep: Callable[[float], None] | None = None,
    ) -> None:
        import time

        self.transport = transport
        self.policy = policy or FetchPolicy()
        self.clock = clock if clock is not None else time.monotonic
        self.sleep = sleep if sleep is not None else time.sleep
        self._last_request_at: float | None = None

    def get(self, url: str) -> HttpResponse:
        """One GET, never issued sooner than delay_ms after the previous."""
        min_gap = self.policy.delay_ms / 1000.0
        if self._last_request_at is not None:
            wait = min_gap - (self.clock() - self._last_request_at)
            if wait > 0:
                self.sleep(wait)
        self._last_request_at = self.clock()
        return self.transport.get(url, self.policy.timeout_ms / 1000.0)


def month_index_url(base_url: str, ref: MonthRef, api_key: str) -> str:
    return f"{base_url}/{ref.year}/{ref.month}.json?api-key={api_key}"


def fetch_month_index(
    client: ArchiveClient,
    ref: MonthRef,
    api_key: str,
    base_url: str = DEFAULT_BASE_URL,
) -> list[IndexEntry]:
    """Fetch one month of the archive index.

    Returns one entry per listed article. Retries rate-limit and transport
    failures up to the policy's max_retries before giving up.
    """
    url = month_index_url(base_url, ref, api_key)
    attempts = client.policy.max_retries + 1
    response: HttpResponse | None = None
    last_failure = ""
    for _ in range(attempts):
        try:
            response = client.get(url)
        except Exception as exc:
            last_failure = f"transport failure: {exc}"
            response = None
            continue
        if response.status in (401, 403):
            raise AuthError(f"archive rejected the API key (HTTP {response.status})")
        if response.status == 429:
            last_failure = "HTTP 429"
            response = None
            continue
        if response.status != 200:
            last_failure = f"HTTP {response.status}"
            response = None
            continue
        break
    if response is None:
        if last_failure == "HTTP 429":
            raise RateLimited(
                f"{ref.year}-{ref.month:02d}: still rate limited after "
                f"{attempts} attempts"
            )
        raise TransportError(f"{ref.year}-{ref.month:02d}: {last_failure}")
    try:
        data = json.loads(response.body.decode("utf-8"))
        docs = data["response"]["docs"]
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise MalformedIndex(f"{ref.year}-{ref.month:02d}: {exc}") from None
    if not isinstance(docs, list):
        raise MalformedIndex(f"{ref.year}-{ref.month:02d}: docs is not a list")
    entries: list[IndexEntry] = []
    for doc in docs:
        if not isinstance(doc, dict) or not doc.get("web_url"):
            raise MalformedIndex(
                f"{ref.year}-{ref.month:02d}: index doc without web_url"
            )
        entries.append(
            IndexEntry(
                url=str(doc["web_url"]),
                year=ref.year,
                month=ref.month,
                raw_category=str(doc.get("section_name") or ""),
            )
        )
    logger.info("index %d-%02d: %d articles", ref.year, ref.month, len(entries))
    return entries


class _MainTextExtractor(HTMLParser):
    """Collect text from <article> blocks, or every <p> when none exist."""

    _SKIP = {"script", "style", "noscript"}

    def __init__(self) -> None:
        super().__init__()
        self.article_depth = 0
        self.p_depth = 0
        self.skip_depth = 0
        self.article_chunks: list[str] = []
        self.p_chunks: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in self._SKIP:
            self.skip_depth += 1
        elif tag == "article":
            self.article_depth += 1
        elif tag == "p":
            self.p_depth += 1

    def handle_endtag(self, tag: str) -> None:
        if tag in self._SKIP and self.skip_depth:
            self.skip_depth -= 1
        elif tag == "article" and self.article_depth:
            self.article_depth -= 1
        elif tag == "p" and self.p_depth:
            self.p_depth -= 1

    def handle_data(self, data: str) -> None:
        if self.skip_depth:
            return
        if self.article_depth:
            self.article_chunks.append(data)
        elif self.p_depth:
            self.p_chunks.append(data)


def extract_main_text(html: str) -> str:
    parser = _MainTextExtractor()
    parser.feed(html)
    chunks = parser.article_chunks or parser.p_chunks
    return normalize_ws(" ".join(chunks))


Extractor = Callable[[str], str]


def scrape_article(
    client: ArchiveClient, url: str, extractor: Extractor = extract_main_text
) -> ScrapeResult:
    """Fetch one article page and pull its main text.

    Fetch and extraction failures come back as statuses so a long scrape
    run survives individual bad pages; only a malformed URL raises.
    """
    parsed = urlparse(url)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise InvalidUrl(f"not an http(s) URL: {url!r}")
    attempts = client.policy.max_retries + 1
    response: HttpResponse | None = None
    for _ in range(attempts):
        try:
            response = client.get(url)
        except Exception:
            response = None
            continue
        if response.status == 200:
            break
        response = None
    if response is None:
        return ScrapeResult(url=url, status="fetch_failed")
    try:
        text = extractor(response.body.decode("utf-8", errors="replace"))
    except Exception:
        return ScrapeResult(url=url, status="extract_failed")
    if not text.strip():
        return ScrapeResult(url=url, status="extract_failed")
    return ScrapeResult(url=url, status="ok", text=text)


@dataclass(frozen=True)
class IngestSummary:
    manifest: CorpusManifest
    ok: int
    fetch_failed: int
    extract_failed: int


def ingest_months(
    client: ArchiveClient,
    refs: list[MonthRef],
    api_key: str,
    out_dir: str | Path,
    extractor: Extractor = extract_main_text,
    base_url: str = DEFAULT_BASE_URL,
) -> IngestSummary:
    """Fetch, scrape, and store every listed month under out_dir.

    Writes texts/<id>.txt per scraped article, manifest.csv for the
    successes, and failures.csv naming every article that could not be
    fetched or extracted.
    """
    out_dir = Path(out_dir)
    texts_dir = out_dir / "texts"
    rows: list[ManifestRow] = []
    failures: list[tuple[str, str, str]] = []
    counts = {"ok": 0, "fetch_failed": 0, "extract_failed": 0}
    for ref in refs:
        entries = fetch_month_index(client, ref, api_key, base_url=base_url)
        for i, entry in enumerate(entries):
            article_id = f"{ref.year:04d}{ref.month:02d}-{i:05d}"
            result = scrape_article(client, entry.url, extractor)
            counts[result.status] += 1
            if result.status != "ok":
                logger.warning("%s: %s", entry.url, result.status)
                failures.append((article_id, entry.url, result.status))
                continue
            write_raw_article(
                texts_dir, article_id, encode_decade(entry.year), result.text
            )
            rows.append(
                ManifestRow(article_id, entry.year, entry.month, entry.raw_category)
            )
    manifest = CorpusManifest(tuple(rows))
    save_manifest(manifest, out_dir / "manifest.csv")
    import csv

    with (out_dir / "failures.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "url", "status"])
        writer.writerows(failures)
    return IngestSummary(
        manifest=manifest,
        ok=counts["ok"],
        fetch_failed=counts["fetch_failed"],
        extract_failed=counts["extract_failed"],
    )


def merge_chunks(paths: list[str | Path]) -> CorpusManifest:
    """Union several chunk manifests, sorted by (year, month, id).

    An id seen in two chunks is an error naming both files; silent
    first-wins merging would hide scraper restarts gone wrong.
    """
    owner: dict[str, str] = {}
    rows: list[ManifestRow] = []
    for path in paths:
        manifest = load_manifest(path)
        for row in manifest.rows:
            if row.id in owner:
                raise DuplicateId(
                    f"article id {row.id!r} appears in both "
                    f"{owner[row.id]} and {path}"
                )
            owner[row.id] = str(path)
            rows.append(row)
    rows.sort(key=lambda r: (r.year, r.month, r.id))
    return CorpusManifest(tuple(rows), source_path=";".join(str(p) for p in paths))
