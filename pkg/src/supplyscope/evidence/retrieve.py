from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from supplyscope.model import EvidenceItem, RiskDomain
from supplyscope.evidence.ledger import EvidenceLedger
from supplyscope.evidence.sources import EvidenceSource, SourceError

logger = logging.getLogger(__name__)


class NoEvidenceError(RuntimeError):
    """No source produced any item for any query."""


def retrieve(
    sources: Sequence[EvidenceSource],
    queries: Sequence[str],
    ledger: EvidenceLedger,
    domain: RiskDomain | None = None,
    iteration: int | None = None,
    max_workers: int = 4,
) -> list[str]:
    """Dispatch every query to every accepting source and merge into *ledger*.

    Returns the ids of all items this call obtained (deduplicated, in
    query-then-source order), whether or not the ledger already held them.
    A failing source is skipped; if nothing at all comes back,
    :class:`NoEvidenceError` is raised after the ledger is updated.
    """
    if not queries:
        raise ValueError("queries must be non-empty")
    jobs = [(q, s) for q in queries for s in sources if s.accepts(q)]

    def run(job: tuple[str, EvidenceSource]) -> list[EvidenceItem] | SourceError:
        query, source = job
        try:
            return source.search(query)
        except SourceError as exc:
            return exc

    if max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, jobs))
        # pool.map preserves job order, keeping the merge deterministic
    else:
        results = [run(j) for j in jobs]

    ids: list[str] = []
    failures = 0
    for (query, source), result in zip(jobs, results):
        if isinstance(result, SourceError):
            failures += 1
            logger.warning("source %s failed for %r: %s", source.name, query, result)
            continue
        for item in result:
            ledger.add(item, domain, iteration)
            if item.id not in ids:
                ids.append(item.id)
    if not ids:
        raise NoEvidenceError(
            f"no evidence retrievable ({len(jobs)} dispatches, {failures} failed)"
        )
    return ids
