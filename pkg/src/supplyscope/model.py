"""Shared domain types for assessments, evidence and reports.

Every type is a frozen dataclass with ``to_dict``/``from_dict`` helpers. The
canonical on-disk encoding is UTF-8 JSON produced by :func:`dumps`; field
order follows declaration order so output is byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from typing import Any
from urllib.parse import urlparse

EXCERPT_LIMIT = 2000
MIN_ROWS_PER_SECTION = 3

_QUANTIFIABLE = re.compile(r"\d|\bnot found\b", re.IGNORECASE)


class ModelError(ValueError):
    """Raised when a value cannot be a valid instance of a domain type."""


class RiskDomain(str, Enum):
    LICENSE = "License"
    SECURITY = "Security"
    MAINTENANCE = "Maintenance"
    DEPENDENCY = "Dependency"
    REGULATORY = "Regulatory"

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, text: str) -> "RiskDomain":
        key = text.strip().lower()
        for d in cls:
            if key in (d.value.lower(), d.short.lower(), d.name.lower()):
                return d
        raise ModelError(f"unknown risk domain: {text!r}")


_SHORT = {
    RiskDomain.LICENSE: "Li",
    RiskDomain.SECURITY: "Se",
    RiskDomain.MAINTENANCE: "Ma",
    RiskDomain.DEPENDENCY: "De",
    RiskDomain.REGULATORY: "Re",
}

DOMAINS: tuple[RiskDomain, ...] = tuple(RiskDomain)


class Category(str, Enum):
    CORE_ML = "core-ml-framework"
    LLM_INFERENCE = "llm-inference-orchestration"
    AGENT = "ai-agent-framework"
    OTHER = "other"

    @classmethod
    def parse(cls, text: str | None) -> "Category":
        for c in cls:
            if text == c.value:
                return c
        return cls.OTHER


class SourceClass(str, Enum):
    OFFICIAL_DOCS = "official-docs"
    REPOSITORY_METADATA = "repository-metadata"
    VULNERABILITY_DB = "vulnerability-db"
    WEB_SEARCH = "web-search"
    SCORECARD = "scorecard"


def utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_ts(dt: datetime) -> str:
    return utc(dt).isoformat().replace("+00:00", "Z")


def parse_ts(text: str) -> datetime:
    try:
        return utc(datetime.fromisoformat(text.replace("Z", "+00:00")))
    except (AttributeError, ValueError) as exc:
        raise ModelError(f"invalid RFC 3339 timestamp: {text!r}") from exc


def is_absolute_url(text: str) -> bool:
    try:
        parts = urlparse(text)
    except ValueError:
        return False
    return parts.scheme in ("http", "https") and bool(parts.netloc) and " " not in text


def is_quantified(text: str) -> bool:
    """True if *text* carries a number, date, version or an explicit "not found"."""
    return bool(_QUANTIFIABLE.search(text))


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9._-]+", "-", name.lower()).strip("-") or "library"


def evidence_id(url: str, excerpt: str) -> str:
    digest = hashlib.sha256(f"{url}\n{excerpt}".encode("utf-8")).hexdigest()
    return f"ev-{digest[:12]}"


@dataclass(frozen=True)
class Library:
    name: str
    repo_url: str
    category: Category = Category.OTHER
    assessed_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    version: str | None = None

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ModelError("library name must be non-empty")
        if not is_absolute_url(self.repo_url):
            raise ModelError(f"repo-url is not an absolute URL: {self.repo_url!r}")
        if not isinstance(self.category, Category):
            object.__setattr__(self, "category", Category.parse(self.category))
        object.__setattr__(self, "assessed_at", utc(self.assessed_at))

    @property
    def slug(self) -> str:
        return slugify(self.name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "category": self.category.value,
            "repo_url": self.repo_url,
            "version": self.version,
            "assessed_at": format_ts(self.assessed_at),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Library":
        return cls(
            name=d["name"],
            repo_url=d["repo_url"],
            category=Category.parse(d.get("category")),
            assessed_at=parse_ts(d["assessed_at"]),
            version=d.get("version"),
        )


@dataclass(frozen=True)
class EvidenceItem:
    id: str
    url: str
    source_class: SourceClass
    excerpt: str
    retrieved_at: datetime
    query: str

    def __post_init__(self) -> None:
        if not self.excerpt:
            raise ModelError("evidence excerpt must be non-empty")
        if len(self.excerpt) > EXCERPT_LIMIT:
            raise ModelError(f"evidence excerpt exceeds {EXCERPT_LIMIT} chars")
        if self.id != evidence_id(self.url, self.excerpt):
            raise ModelError(f"evidence id {self.id!r} does not match its content")
        object.__setattr__(self, "source_class", SourceClass(self.source_class))
        object.__setattr__(self, "retrieved_at", utc(self.retrieved_at))

    @classmethod
    def create(
        cls,
        url: str,
        excerpt: str,
        source_class: SourceClass | str,
        query: str,
        retrieved_at: datetime | None = None,
    ) -> "EvidenceItem":
        """Build an item, normalising whitespace and truncating the excerpt."""
        text = " ".join(excerpt.split())[:EXCERPT_LIMIT]
        return cls(
            id=evidence_id(url, text),
            url=url,
            source_class=SourceClass(source_class),
            excerpt=text,
            retrieved_at=retrieved_at or datetime.now(timezone.utc),
            query=query,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "url": self.url,
            "source_class": self.source_class.value,
            "excerpt": self.excerpt,
            "retrieved_at": format_ts(self.retrieved_at),
            "query": self.query,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EvidenceItem":
        return cls(
            id=d["id"],
            url=d["url"],
            source_class=SourceClass(d["source_class"]),
            excerpt=d["excerpt"],
            retrieved_at=parse_ts(d["retrieved_at"]),
            query=d.get("query", ""),
        )


@dataclass(frozen=True)
class RiskFactorRow:
    """One row of a section's factor table.

    Construction does not enforce the row invariants so that malformed rows
    can still be represented and reported; see :meth:`violations`.
    """

    factor: str
    observed: str
    rating: int
    justification: str
    control: str
    citations: tuple[str, ...] = ()
    missing_info: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "citations", tuple(self.citations))

    def violations(self) -> list[str]:
        out = []
        if self.rating not in (1, 2, 3, 4, 5):
            out.append(f"rating {self.rating} out of range 1..5")
        if self.missing_info and self.rating != 1:
            out.append("missing-info requires rating 1")
        if not self.missing_info and not self.citations:
            out.append("citations required unless missing-info")
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "factor": self.factor,
            "observed": self.observed,
            "rating": self.rating,
            "justification": self.justification,
            "control": self.control,
            "citations": list(self.citations),
            "missing_info": self.missing_info,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RiskFactorRow":
        return cls(
            factor=d["factor"],
            observed=d["observed"],
            rating=int(d["rating"]),
            justification=d["justification"],
            control=d["control"],
            citations=tuple(d.get("citations", ())),
            missing_info=bool(d.get("missing_info", False)),
        )


@dataclass(frozen=True, order=True)
class RowRef:
    """Reference to ``sections[domain].rows[index]`` inside one report."""

    domain: RiskDomain
    index: int

    def __str__(self) -> str:
        return f"{self.domain.value}#{self.index}"

    @classmethod
    def parse(cls, text: str) -> "RowRef":
        domain, _, idx = text.partition("#")
        if not idx.isdigit():
            raise ModelError(f"invalid row reference: {text!r}")
        return cls(RiskDomain.parse(domain), int(idx))

    def sort_key(self) -> tuple[int, int]:
        return DOMAINS.index(self.domain), self.index


@dataclass(frozen=True)
class DomainAssessment:
    domain: RiskDomain
    rows: tuple[RiskFactorRow, ...]
    score: int
    narrative: str = ""
    iterations_used: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain.value,
            "score": self.score,
            "iterations_used": self.iterations_used,
            "narrative": self.narrative,
            "rows": [r.to_dict() for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DomainAssessment":
        return cls(
            domain=RiskDomain.parse(d["domain"]),
            rows=tuple(RiskFactorRow.from_dict(r) for r in d["rows"]),
            score=int(d["score"]),
            narrative=d.get("narrative", ""),
            iterations_used=int(d.get("iterations_used", 1)),
        )


@dataclass(frozen=True)
class PrioritizedControl:
    ref: RowRef
    rating: int
    control: str

    def to_dict(self) -> dict[str, Any]:
        return {"row": str(self.ref), "rating": self.rating, "control": self.control}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PrioritizedControl":
        return cls(RowRef.parse(d["row"]), int(d["rating"]), d["control"])


@dataclass(frozen=True)
class ExecSummary:
    dashboard: tuple[tuple[RiskDomain, int], ...]
    emergency_issues: tuple[RowRef, ...]
    prioritized_controls: tuple[PrioritizedControl, ...]
    mitigation_strategy: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "dashboard", tuple((d, s) for d, s in self.dashboard))
        object.__setattr__(self, "emergency_issues", tuple(self.emergency_issues))
        object.__setattr__(self, "prioritized_controls", tuple(self.prioritized_controls))

    def to_dict(self) -> dict[str, Any]:
        return {
            "risk_dashboard": [{"domain": d.value, "score": s} for d, s in self.dashboard],
            "emergency_issues": [str(r) for r in self.emergency_issues],
            "prioritized_controls": [c.to_dict() for c in self.prioritized_controls],
            "mitigation_strategy": self.mitigation_strategy,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExecSummary":
        return cls(
            dashboard=tuple(
                (RiskDomain.parse(x["domain"]), int(x["score"])) for x in d["risk_dashboard"]
            ),
            emergency_issues=tuple(RowRef.parse(r) for r in d["emergency_issues"]),
            prioritized_controls=tuple(
                PrioritizedControl.from_dict(c) for c in d["prioritized_controls"]
            ),
            mitigation_strategy=d["mitigation_strategy"],
        )


@dataclass(frozen=True)
class AssessmentReport:
    library: Library
    sections: tuple[DomainAssessment, ...]
    summary: ExecSummary
    trust_sum: int
    trust_mean: Fraction
    evidence: tuple[EvidenceItem, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sections", tuple(self.sections))
        object.__setattr__(self, "evidence", tuple(self.evidence))
        object.__setattr__(self, "trust_mean", Fraction(self.trust_mean))

    def section(self, domain: RiskDomain) -> DomainAssessment:
        for s in self.sections:
            if s.domain is domain:
                return s
        raise KeyError(domain)

    def row(self, ref: RowRef) -> RiskFactorRow:
        return self.section(ref.domain).rows[ref.index]

    def iter_rows(self):
        for s in self.sections:
            for i, r in enumerate(s.rows):
                yield RowRef(s.domain, i), r

    @property
    def scores(self) -> tuple[int, ...]:
        return tuple(s.score for s in self.sections)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "library": self.library.to_dict(),
            "trust_sum": self.trust_sum,
            "trust_mean": float(self.trust_mean),
            "executive_summary": self.summary.to_dict(),
            "sections": [s.to_dict() for s in self.sections],
            "evidence": [e.to_dict() for e in self.evidence],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "AssessmentReport":
        return cls(
            library=Library.from_dict(d["library"]),
            sections=tuple(DomainAssessment.from_dict(s) for s in d["sections"]),
            summary=ExecSummary.from_dict(d["executive_summary"]),
            trust_sum=int(d["trust_sum"]),
            trust_mean=Fraction(repr(d["trust_mean"])),
            evidence=tuple(EvidenceItem.from_dict(e) for e in d["evidence"]),
        )


def dumps(obj: Any) -> str:
    """Canonical JSON text for a model object (or plain JSON data)."""
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def validate_report(report: AssessmentReport, max_loop_depth: int | None = None) -> list[str]:
    """Return every invariant violation in *report*; an empty list means ok."""
    from supplyscope.rubric import aggregate_trust, score_ratings

    problems: list[str] = []
    seen = [s.domain for s in report.sections]
    for d in DOMAINS:
        if d not in seen:
            problems.append(f"missing domain: {d.value}")
        elif seen.count(d) > 1:
            problems.append(f"duplicate domain: {d.value}")
    if not problems and tuple(seen) != DOMAINS:
        problems.append("sections out of domain order")

    ledger = {e.id for e in report.evidence}
    for s in report.sections:
        where = s.domain.value
        if len(s.rows) < MIN_ROWS_PER_SECTION:
            problems.append(f"{where}: fewer than {MIN_ROWS_PER_SECTION} factor rows")
        if s.score not in (1, 2, 3, 4, 5):
            problems.append(f"{where}: domain score {s.score} out of range")
        elif s.rows and all(r.rating in (1, 2, 3, 4, 5) for r in s.rows):
            expected = score_ratings([r.rating for r in s.rows])
            if s.score != expected:
                problems.append(f"{where}: domain score {s.score} != rubric recomputation {expected}")
        if s.iterations_used < 1:
            problems.append(f"{where}: iterations-used must be >= 1")
        if max_loop_depth is not None and s.iterations_used > max_loop_depth:
            problems.append(f"{where}: iterations-used exceeds max loop depth {max_loop_depth}")
        for i, row in enumerate(s.rows):
            for v in row.violations():
                problems.append(f"{where}#{i}: {v}")
            for c in row.citations:
                if c not in ledger:
                    problems.append(f"{where}#{i}: citation {c} not in evidence ledger")

    if len(report.sections) == len(DOMAINS):
        try:
            total = aggregate_trust(report.scores, "sum")
        except ValueError:
            total = None
        if total is not None:
            if report.trust_sum != total:
                problems.append(f"trust-sum {report.trust_sum} != sum of domain scores {total}")
            if report.trust_mean != Fraction(total, 5):
                problems.append("trust-mean != trust-sum / 5")

    problems.extend(_summary_violations(report))
    return problems


def _summary_violations(report: AssessmentReport) -> list[str]:
    out = []
    summary = report.summary
    by_domain = {s.domain: s for s in report.sections}
    if [d for d, _ in summary.dashboard] != [s.domain for s in report.sections] or any(
        by_domain[d].score != score for d, score in summary.dashboard if d in by_domain
    ):
        out.append("risk dashboard does not mirror section scores")

    def lookup(ref: RowRef) -> RiskFactorRow | None:
        s = by_domain.get(ref.domain)
        if s is None or not 0 <= ref.index < len(s.rows):
            return None
        return s.rows[ref.index]

    for ref in summary.emergency_issues:
        row = lookup(ref)
        if row is None:
            out.append(f"emergency issue {ref} references no row")
        elif row.rating != 1:
            out.append(f"emergency issue {ref} has rating {row.rating}, expected 1")

    keys = []
    for pc in summary.prioritized_controls:
        row = lookup(pc.ref)
        if row is None:
            out.append(f"prioritized control {pc.ref} references no row")
            continue
        if row.rating != pc.rating:
            out.append(f"prioritized control {pc.ref} rating does not match its row")
        keys.append((pc.rating, DOMAINS.index(pc.ref.domain)))
    if keys != sorted(keys):
        out.append("prioritized controls not ordered by rating then domain")
    return out
