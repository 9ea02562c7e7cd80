"""Evidence retrieval: query generation, sources, caching and the ledger."""

from supplyscope.evidence.cache import CachedSource, ResponseCache
from supplyscope.evidence.ledger import EvidenceLedger
from supplyscope.evidence.queries import generate_queries
from supplyscope.evidence.retrieve import NoEvidenceError, retrieve
from supplyscope.evidence.sources import (
    EvidenceSource,
    FixtureSource,
    GitHubSource,
    OsvSource,
    RateLimitedSource,
    SourceError,
    TokenBucket,
    WebSearchSource,
)

__all__ = [
    "CachedSource",
    "EvidenceLedger",
    "EvidenceSource",
    "FixtureSource",
    "GitHubSource",
    "NoEvidenceError",
    "OsvSource",
    "RateLimitedSource",
    "ResponseCache",
    "SourceError",
    "TokenBucket",
    "WebSearchSource",
    "generate_queries",
    "retrieve",
]
