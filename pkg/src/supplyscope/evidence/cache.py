"""Content-addressed on-disk response cache keyed by (source, query)."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from pathlib import Path
from typing import Callable

from supplyscope.model import EvidenceItem
from supplyscope.evidence.sources import EvidenceSource, SourceError

DEFAULT_TTL = 7 * 24 * 3600.0


class ResponseCache:
    def __init__(
        self,
        directory: str | Path,
        ttl: float = DEFAULT_TTL,
        clock: Callable[[], float] = time.time,
    ):
        self.directory = Path(directory)
        self.ttl = ttl
        self._clock = clock

    @staticmethod
    def key(source: str, query: str) -> str:
        return hashlib.sha256(f"{source}\0{query}".encode("utf-8")).hexdigest()

    def _path(self, source: str, query: str) -> Path:
        k = self.key(source, query)
        return self.directory / k[:2] / f"{k}.json"

    def get(self, source: str, query: str) -> list[EvidenceItem] | None:
        path = self._path(source, query)
        try:
            raw = json.loads(path.read_text("utf-8"))
        except (OSError, ValueError):
            return None
        if self._clock() - raw["stored_at"] > self.ttl:
            return None
        return [EvidenceItem.from_dict(i) for i in raw["items"]]

    def put(self, source: str, query: str, items: list[EvidenceItem]) -> None:
        path = self._path(source, query)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = {
            "source": source,
            "query": query,
            "stored_at": self._clock(),
            "items": [i.to_dict() for i in items],
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(body, fh, ensure_ascii=False)
        os.replace(tmp, path)


class CachedSource(EvidenceSource):
    """Serve from cache when fresh; in offline mode a miss is an error."""

    def __init__(self, inner: EvidenceSource, cache: ResponseCache, offline: bool = False):
        self.inner = inner
        self.cache = cache
        self.offline = offline
        self.name = inner.name
        self.source_class = inner.source_class
        self.local = inner.local
        self.misses = 0

    def accepts(self, query: str) -> bool:
        return self.inner.accepts(query)

    def search(self, query: str) -> list[EvidenceItem]:
        hit = self.cache.get(self.name, query)
        if hit is not None:
            return hit
        self.misses += 1
        if self.offline and not self.inner.local:
            raise SourceError(f"{self.name}: offline and no cached response for {query!r}")
        items = self.inner.search(query)
        self.cache.put(self.name, query, items)
        return items
