"""Id-keyed, provenance-tracked evidence store shared across sections."""

from __future__ import annotations

import threading
from typing import Iterable, Iterator

from supplyscope.model import EvidenceItem, RiskDomain


class EvidenceLedger:
    """Deduplicating evidence collection.

    Insertion is thread-safe. Two items with the same id have the same
    content; they can differ only in the query that found them, and the
    ledger keeps the smallest query string so the stored item does not depend
    on which section got there first.
    """

    def __init__(self, items: Iterable[EvidenceItem] = ()):
        self._items: dict[str, EvidenceItem] = {}
        self._provenance: dict[str, set[tuple[int, int]]] = {}
        self._lock = threading.Lock()
        for item in items:
            self.add(item)

    def add(
        self,
        item: EvidenceItem,
        domain: RiskDomain | None = None,
        iteration: int | None = None,
    ) -> bool:
        """Insert *item*; returns True if its id was not present before."""
        with self._lock:
            held = self._items.get(item.id)
            fresh = held is None
            if fresh or item.query < held.query:
                self._items[item.id] = item
            if domain is not None and iteration is not None:
                key = (list(RiskDomain).index(RiskDomain(domain)), iteration)
                self._provenance.setdefault(item.id, set()).add(key)
            return fresh

    def __contains__(self, item_id: object) -> bool:
        return item_id in self._items

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[EvidenceItem]:
        return iter(self.items())

    def get(self, item_id: str) -> EvidenceItem | None:
        return self._items.get(item_id)

    def items(self) -> list[EvidenceItem]:
        """All items ordered by id, so output does not depend on insertion order."""
        with self._lock:
            return [self._items[k] for k in sorted(self._items)]

    def provenance(self, item_id: str) -> list[tuple[RiskDomain, int]]:
        domains = list(RiskDomain)
        with self._lock:
            keys = sorted(self._provenance.get(item_id, ()))
        return [(domains[d], it) for d, it in keys]

    def subset(self, ids: Iterable[str]) -> "EvidenceLedger":
        """A new ledger holding only *ids* (unknown ids are skipped)."""
        view = EvidenceLedger()
        for i in ids:
            item = self._items.get(i)
            if item is not None:
                view._items[i] = item
        return view
