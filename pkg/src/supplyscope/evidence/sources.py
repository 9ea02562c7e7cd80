"""Evidence source adapters.

All adapters share the :class:`EvidenceSource` interface so tests can swap
network sources for :class:`FixtureSource`. Credentials come from the
environment:

``GITHUB_TOKEN``
    optional bearer token for the repository-metadata adapter.
``SUPPLYSCOPE_SEARCH_KEY``
    API key for the generic web-search adapter.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import httpx

from supplyscope.model import EvidenceItem, ModelError, SourceClass, parse_ts
from supplyscope.evidence.queries import repo_path

logger = logging.getLogger(__name__)

FIXTURE_EPOCH = "1970-01-01T00:00:00Z"


class SourceError(RuntimeError):
    """A source could not answer a query (network, auth, offline cache miss)."""


class EvidenceSource(ABC):
    """Something that turns a query string into evidence items."""

    name: str = "source"
    source_class: SourceClass = SourceClass.WEB_SEARCH
    #: False for adapters that reach the network; used by offline mode.
    local: bool = False

    def accepts(self, query: str) -> bool:
        return True

    @abstractmethod
    def search(self, query: str) -> list[EvidenceItem]:
        ...

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class FixtureSource(EvidenceSource):
    """Canned responses loaded from one JSON file.

    File schema::

        {
          "source_class": "vulnerability-db",
          "retrieved_at": "2025-05-01T00:00:00Z",      # default for items
          "fail": ["substring", ...],                    # optional
          "responses": [
            {"match": "substring", "items": [
                {"url": "...", "excerpt": "...", "retrieved_at": "..."}
            ]}
          ]
        }

    ``match`` is a case-insensitive substring test against the query; every
    matching entry contributes its items, in file order. Queries matching a
    ``fail`` substring raise :class:`SourceError`.
    """

    local = True

    def __init__(self, path: str | Path, name: str | None = None):
        self.path = Path(path)
        self.name = name or self.path.stem
        raw = json.loads(self.path.read_text("utf-8"))
        self.source_class = SourceClass(raw.get("source_class", "web-search"))
        default_ts = raw.get("retrieved_at", FIXTURE_EPOCH)
        self._fail = [s.lower() for s in raw.get("fail", ())]
        self._responses: list[tuple[str, list[dict[str, Any]]]] = []
        for entry in raw.get("responses", ()):
            items = [dict(i, retrieved_at=i.get("retrieved_at", default_ts)) for i in entry["items"]]
            self._responses.append((entry["match"].lower(), items))

    @classmethod
    def from_directory(cls, directory: str | Path) -> list["FixtureSource"]:
        return [cls(p) for p in sorted(Path(directory).glob("*.json"))]

    def search(self, query: str) -> list[EvidenceItem]:
        q = query.lower()
        if any(f in q for f in self._fail):
            raise SourceError(f"{self.name}: scripted failure for {query!r}")
        out = []
        for match, items in self._responses:
            if match in q:
                for i in items:
                    out.append(
                        EvidenceItem.create(
                            url=i["url"],
                            excerpt=i["excerpt"],
                            source_class=self.source_class,
                            query=query,
                            retrieved_at=parse_ts(i["retrieved_at"]),
                        )
                    )
        return out


class TokenBucket:
    """Blocking token bucket; ``rate`` tokens per second, ``burst`` capacity."""

    def __init__(
        self,
        rate: float = 1.0,
        burst: int = 1,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.burst = burst
        self._clock = clock
        self._sleep = sleep
        self._tokens = float(burst)
        self._stamp = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            self._tokens = min(self.burst, self._tokens + (now - self._stamp) * self.rate)
            self._stamp = now
            if self._tokens < 1:
                wait = (1 - self._tokens) / self.rate
                self._sleep(wait)
                self._stamp = self._clock()
                self._tokens = 0.0
            else:
                self._tokens -= 1


class RateLimitedSource(EvidenceSource):
    def __init__(self, inner: EvidenceSource, bucket: TokenBucket | None = None):
        self.inner = inner
        self.bucket = bucket or TokenBucket()
        self.name = inner.name
        self.source_class = inner.source_class
        self.local = inner.local

    def accepts(self, query: str) -> bool:
        return self.inner.accepts(query)

    def search(self, query: str) -> list[EvidenceItem]:
        self.bucket.acquire()
        return self.inner.search(query)


def _http_get_json(client: httpx.Client, url: str, expect: type = dict, **kwargs) -> Any:
    """GET and decode JSON; ``None`` on 404, :class:`SourceError` on anything unusable."""
    try:
        resp = client.get(url, **kwargs)
    except httpx.HTTPError as exc:
        raise SourceError(f"GET {url} failed: {exc}") from exc
    if resp.status_code == 404:
        return None
    if resp.status_code >= 400:
        raise SourceError(f"GET {url} returned HTTP {resp.status_code}")
    try:
        data = resp.json()
    except ValueError as exc:
        raise SourceError(f"GET {url} returned invalid JSON") from exc
    if not isinstance(data, expect):
        raise SourceError(f"GET {url} returned {type(data).__name__}, expected {expect.__name__}")
    return data


class GitHubSource(EvidenceSource):
    """Repository metadata from the GitHub REST API.

    The endpoint is chosen from keywords in the query; each call yields at
    most one item summarising the response.
    """

    name = "github"
    source_class = SourceClass.REPOSITORY_METADATA

    def __init__(
        self,
        repo_url: str,
        client: httpx.Client | None = None,
        api: str = "https://api.github.com",
        token_env: str = "GITHUB_TOKEN",
    ):
        self.repo = repo_path(repo_url)
        self.html = f"https://github.com/{self.repo}"
        headers = {"Accept": "application/vnd.github+json"}
        token = os.environ.get(token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.client = client or httpx.Client(timeout=20.0)
        self.client.headers.update(headers)
        self.api = api.rstrip("/")

    def search(self, query: str) -> list[EvidenceItem]:
        q = query.lower()
        base = f"{self.api}/repos/{self.repo}"
        if "license" in q or "patent" in q:
            data = _http_get_json(self.client, f"{base}/license")
            if data is None:
                return [self._item(f"{self.html}", "LICENSE file not found via repository API", query)]
            lic = data.get("license") or {}
            text = f"License detected: {lic.get('spdx_id')} ({lic.get('name')}); file {data.get('path')}"
            return [self._item(data.get("html_url") or self.html, text, query)]
        if "release" in q:
            data = _http_get_json(self.client, f"{base}/releases", list, params={"per_page": 10}) or []
            if not data:
                return [self._item(f"{self.html}/releases", "No published releases found", query)]
            tags = "; ".join(f"{r.get('tag_name')} {str(r.get('published_at'))[:10]}" for r in data)
            return [self._item(f"{self.html}/releases", f"{len(data)} most recent releases: {tags}", query)]
        if "contributor" in q:
            data = _http_get_json(self.client, f"{base}/contributors", list, params={"per_page": 100}) or []
            top = ", ".join(f"{c.get('login')} ({c.get('contributions')})" for c in data[:10])
            text = f"{len(data)} contributors listed (first page, max 100); top: {top}"
            return [self._item(f"{self.html}/graphs/contributors", text, query)]
        if "security policy" in q or "security.md" in q:
            data = _http_get_json(self.client, f"{base}/contents/SECURITY.md")
            if data is None:
                return [self._item(f"{self.html}/security/policy", "SECURITY.md not found in repository root", query)]
            return [self._item(data.get("html_url") or self.html, f"SECURITY.md present ({data.get('size')} bytes)", query)]
        if "issue" in q:
            data = _http_get_json(
                self.client, f"{base}/issues", list, params={"state": "all", "per_page": 30}
            ) or []
            closed = sum(1 for i in data if i.get("state") == "closed")
            text = f"{len(data)} most recent issues sampled, {closed} closed"
            return [self._item(f"{self.html}/issues", text, query)]
        data = _http_get_json(self.client, base)
        if data is None:
            raise SourceError(f"repository {self.repo} not found")
        text = (
            f"stars {data.get('stargazers_count')}, forks {data.get('forks_count')}, "
            f"open issues {data.get('open_issues_count')}, last push {data.get('pushed_at')}, "
            f"license {((data.get('license') or {}).get('spdx_id'))}, archived {data.get('archived')}"
        )
        return [self._item(self.html, text, query)]

    def _item(self, url: str, text: str, query: str) -> EvidenceItem:
        return EvidenceItem.create(url, text, self.source_class, query, datetime.now(timezone.utc))


_VULN_WORDS = re.compile(r"cve|vulnerab|advisor|security|patch|exploit", re.IGNORECASE)


class OsvSource(EvidenceSource):
    """Advisory lookup against an OSV-style ``/v1/query`` endpoint."""

    name = "osv"
    source_class = SourceClass.VULNERABILITY_DB

    def __init__(
        self,
        package: str,
        ecosystem: str = "PyPI",
        client: httpx.Client | None = None,
        endpoint: str = "https://api.osv.dev/v1/query",
    ):
        self.package = package
        self.ecosystem = ecosystem
        self.client = client or httpx.Client(timeout=20.0)
        self.endpoint = endpoint

    def accepts(self, query: str) -> bool:
        return bool(_VULN_WORDS.search(query))

    def search(self, query: str) -> list[EvidenceItem]:
        body = {"package": {"name": self.package, "ecosystem": self.ecosystem}}
        try:
            resp = self.client.post(self.endpoint, json=body)
        except httpx.HTTPError as exc:
            raise SourceError(f"OSV query failed: {exc}") from exc
        if resp.status_code >= 400:
            raise SourceError(f"OSV query returned HTTP {resp.status_code}")
        try:
            vulns = resp.json().get("vulns") or []
        except (ValueError, AttributeError) as exc:
            raise SourceError("OSV response is not a JSON object") from exc
        now = datetime.now(timezone.utc)
        if not vulns:
            url = f"https://osv.dev/list?ecosystem={self.ecosystem}&q={self.package}"
            text = f"0 advisories recorded for {self.ecosystem}/{self.package} as of {now:%Y-%m-%d}"
            return [EvidenceItem.create(url, text, self.source_class, query, now)]
        out = []
        for v in vulns:
            aliases = ", ".join(v.get("aliases") or []) or "no aliases"
            severity = ",".join(s.get("score", "") for s in v.get("severity") or []) or "unrated"
            text = (
                f"{v.get('id')} ({aliases}): {v.get('summary') or v.get('details', '')[:300]}; "
                f"published {v.get('published')}; modified {v.get('modified')}; severity {severity}"
            )
            out.append(
                EvidenceItem.create(f"https://osv.dev/vulnerability/{v.get('id')}", text,
                                    self.source_class, query, now)
            )
        return out


class WebSearchSource(EvidenceSource):
    """Generic JSON search endpoint.

    Sends ``GET endpoint?q=<query>`` (plus ``extra_params``) and accepts either
    ``{"results": [{"url", "snippet"}]}`` or Google-style
    ``{"items": [{"link", "snippet"}]}`` bodies.
    """

    name = "web-search"
    source_class = SourceClass.WEB_SEARCH

    def __init__(
        self,
        endpoint: str,
        client: httpx.Client | None = None,
        key_env: str = "SUPPLYSCOPE_SEARCH_KEY",
        extra_params: dict[str, str] | None = None,
        max_results: int = 5,
    ):
        self.endpoint = endpoint
        self.client = client or httpx.Client(timeout=20.0)
        self.params = dict(extra_params or {})
        key = os.environ.get(key_env)
        if key:
            self.params["key"] = key
        self.max_results = max_results

    def search(self, query: str) -> list[EvidenceItem]:
        data = _http_get_json(self.client, self.endpoint, params={**self.params, "q": query}) or {}
        hits = data.get("results") or data.get("items") or []
        now = datetime.now(timezone.utc)
        out = []
        for h in hits[: self.max_results]:
            url = h.get("url") or h.get("link")
            snippet = h.get("snippet") or h.get("title")
            if not url or not snippet:
                continue
            try:
                out.append(EvidenceItem.create(url, snippet, self.source_class, query, now))
            except ModelError:
                logger.debug("dropping unusable search hit %r", h)
        return out
