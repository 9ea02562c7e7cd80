"""Assessment DAG: plan -> five section loops in parallel -> report.

Each section loops retrieve -> prompt -> synthesize -> parse -> quality check
until the draft passes or the loop depth is exhausted. Failures degrade a
section to missing-information rows instead of aborting the run.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from supplyscope.config import PipelineConfig
from supplyscope.evidence import EvidenceLedger, EvidenceSource, NoEvidenceError, generate_queries, retrieve
from supplyscope.model import (
    DOMAINS,
    MIN_ROWS_PER_SECTION,
    AssessmentReport,
    DomainAssessment,
    Library,
    RiskDomain,
    RiskFactorRow,
    validate_report,
)
from supplyscope.report import compile_report
from supplyscope.rubric import score_ratings
from supplyscope.synthesis import (
    KEY_CONCEPTS,
    ProviderError,
    QualityVerdict,
    SectionDraft,
    SynthesisProvider,
    UnparseableSection,
    build_plan_prompt,
    build_prompt,
    missing_info_rows,
    parse_section,
    quality_check,
)

logger = logging.getLogger(__name__)

OK = "ok"
DEGRADED = "degraded"


@dataclass(frozen=True)
class SectionPlan:
    domain: RiskDomain
    queries: tuple[str, ...]


@dataclass(frozen=True)
class AssessmentPlan:
    library: Library
    sections: tuple[SectionPlan, ...]
    max_loop_depth: int = 3

    def __post_init__(self) -> None:
        if tuple(s.domain for s in self.sections) != DOMAINS:
            raise ValueError("plan must cover each risk domain exactly once, in order")
        if self.max_loop_depth < 1:
            raise ValueError("max_loop_depth must be >= 1")


@dataclass
class SectionTrace:
    domain: RiskDomain
    iterations_used: int = 0
    evidence_ids: list[str] = field(default_factory=list)
    history: list[dict[str, Any]] = field(default_factory=list)
    status: str = OK
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain.value,
            "iterations_used": self.iterations_used,
            "status": self.status,
            "evidence_ids": list(self.evidence_ids),
            "history": list(self.history),
            "notes": list(self.notes),
            "seconds": round(self.seconds, 4),
        }


@dataclass
class RunTrace:
    sections: dict[RiskDomain, SectionTrace] = field(default_factory=dict)
    node_seconds: dict[str, float] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return DEGRADED if any(s.status != OK for s in self.sections.values()) else OK

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "sections": [self.sections[d].to_dict() for d in DOMAINS if d in self.sections],
            "node_seconds": {k: round(v, 4) for k, v in self.node_seconds.items()},
        }


def plan(
    library: Library,
    provider: SynthesisProvider | None = None,
    max_loop_depth: int = 3,
) -> AssessmentPlan:
    """Template queries for all five domains, plus any provider suggestions."""
    sections = []
    for domain in DOMAINS:
        queries = generate_queries(domain, library, 1, [])
        if provider is not None:
            try:
                answer = provider.synthesize(build_plan_prompt(domain, library, queries))
            except ProviderError as exc:
                logger.warning("planning suggestions unavailable for %s: %s", domain.value, exc)
                answer = ""
            for line in answer.splitlines():
                line = line.strip()
                if line.startswith("- "):
                    q = line[2:].strip()
                    if q and q not in queries:
                        queries.append(q)
        sections.append(SectionPlan(domain, tuple(queries)))
    return AssessmentPlan(library, tuple(sections), max_loop_depth)


class _Synthesizer:
    """Provider wrapper adding retries and optional serialization."""

    def __init__(self, provider: SynthesisProvider, retries: int):
        self.provider = provider
        self.retries = retries
        self._lock = None if provider.concurrent_safe else threading.Lock()

    def __call__(self, prompt: str) -> str:
        last: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                if self._lock is None:
                    return self.provider.synthesize(prompt)
                with self._lock:
                    return self.provider.synthesize(prompt)
            except ProviderError as exc:
                last = exc
        raise ProviderError(f"provider failed after {self.retries + 1} attempts: {last}")

    synthesize = __call__


def _missing_row(factor: str, detail: str) -> RiskFactorRow:
    return RiskFactorRow(
        factor=factor,
        observed="not found",
        rating=1,
        justification=detail,
        control=f"Obtain verifiable evidence on {factor}",
        citations=(),
        missing_info=True,
    )


def _resolve_gaps(domain: RiskDomain, draft: SectionDraft | None, verdict: QualityVerdict | None,
                  depth: int) -> list[RiskFactorRow]:
    """Turn a draft that never passed into a complete, high-risk row set."""
    rows = list(draft.rows) if draft is not None else []
    note = f"unresolved after {depth} iteration(s)"
    if verdict is not None:
        for i in verdict.unquantified:
            r = rows[i]
            rows[i] = RiskFactorRow(
                factor=r.factor,
                observed=f"not found (no verifiable metric; draft said: {r.observed})",
                rating=1,
                justification=f"Quantified evidence {note}. {r.justification}".strip(),
                control=r.control,
                citations=r.citations,
                missing_info=True,
            )
        for concept in verdict.uncovered:
            rows.append(_missing_row(concept, f"No evidence for this key concept; {note}"))
    if draft is None:
        rows = [_missing_row(c, f"No parseable section; {note}") for c in KEY_CONCEPTS[domain]]
    factors = {r.factor for r in rows}
    for concept in KEY_CONCEPTS[domain]:
        if len(rows) >= MIN_ROWS_PER_SECTION:
            break
        if concept not in factors:
            rows.append(_missing_row(concept, f"Coverage floor not met; {note}"))
    while len(rows) < MIN_ROWS_PER_SECTION:
        rows.append(_missing_row(f"additional {domain.value.lower()} factor {len(rows) + 1}",
                                 f"Coverage floor not met; {note}"))
    return rows


def run_section(
    section: SectionPlan,
    library: Library,
    sources: Sequence[EvidenceSource],
    provider: SynthesisProvider | _Synthesizer,
    ledger: EvidenceLedger,
    max_loop_depth: int = 3,
) -> tuple[DomainAssessment, SectionTrace]:
    if max_loop_depth < 1:
        raise ValueError("max_loop_depth must be >= 1")
    synth = provider if isinstance(provider, _Synthesizer) else _Synthesizer(provider, 0)
    domain = section.domain
    trace = SectionTrace(domain)
    started = time.perf_counter()
    consumed: list[str] = []
    gaps: tuple[str, ...] = ()
    draft: SectionDraft | None = None
    verdict: QualityVerdict | None = None
    rows: list[RiskFactorRow] | None = None

    for iteration in range(1, max_loop_depth + 1):
        trace.iterations_used = iteration
        queries = list(section.queries) if iteration == 1 else generate_queries(domain, library, iteration, gaps)
        try:
            ids = retrieve(sources, queries, ledger, domain, iteration) if sources else []
            if not ids:
                raise NoEvidenceError("no sources configured")
        except NoEvidenceError as exc:
            trace.notes.append(f"iteration {iteration}: {exc}")
            ids = []
        consumed += [i for i in ids if i not in consumed]
        view = ledger.subset(consumed)
        prompt = build_prompt(domain, library, view.items(), iteration, gaps)
        try:
            raw = synth(prompt)
        except ProviderError as exc:
            trace.status = DEGRADED
            trace.notes.append(f"iteration {iteration}: {exc}")
            rows = [_missing_row(c, f"Synthesis provider unavailable: {exc}") for c in KEY_CONCEPTS[domain]]
            break
        try:
            draft = parse_section(domain, raw, view)
        except UnparseableSection as exc:
            draft, verdict = None, None
            gaps = ("unparseable section",)
            trace.history.append({"iteration": iteration, "passed": False, "gaps": list(gaps),
                                  "parse_errors": exc.errors})
            continue
        verdict = quality_check(draft)
        trace.history.append({"iteration": iteration, "passed": verdict.passed, "gaps": list(verdict.gaps),
                              "parse_errors": list(draft.errors)})
        if verdict.passed:
            rows = list(draft.rows)
            break
        gaps = verdict.gaps

    if rows is None:
        trace.status = DEGRADED
        trace.notes.append(f"quality check unmet at depth {max_loop_depth}")
        rows = _resolve_gaps(domain, draft, verdict, max_loop_depth)
    if not consumed:
        trace.status = DEGRADED
        trace.notes.append("no evidence retrievable for this section")
    trace.evidence_ids = list(consumed)
    trace.seconds = time.perf_counter() - started
    assessment = DomainAssessment(
        domain=domain,
        rows=tuple(rows),
        score=score_ratings(r.rating for r in rows),
        narrative=draft.narrative if draft is not None else "",
        iterations_used=trace.iterations_used,
    )
    return assessment, trace


def run_assessment(
    library: Library,
    sources: Sequence[EvidenceSource],
    provider: SynthesisProvider,
    config: PipelineConfig | None = None,
    section_order: Sequence[RiskDomain] | None = None,
) -> tuple[AssessmentReport, RunTrace]:
    """Run the full pipeline for one library.

    ``section_order`` only changes task submission order; results do not
    depend on it.
    """
    config = config or PipelineConfig()
    trace = RunTrace()
    synth = _Synthesizer(provider, config.provider_retries)

    t0 = time.perf_counter()
    the_plan = plan(library, synth if config.plan_suggestions else None, config.max_loop_depth)
    trace.node_seconds["plan"] = time.perf_counter() - t0

    ledger = EvidenceLedger()
    by_domain = {s.domain: s for s in the_plan.sections}
    order = list(section_order or DOMAINS)
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=len(DOMAINS)) as pool:
        futures = {
            d: pool.submit(run_section, by_domain[d], library, sources, synth, ledger, config.max_loop_depth)
            for d in order
        }
        results = {d: f.result() for d, f in futures.items()}
    trace.node_seconds["sections"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    sections = [results[d][0] for d in DOMAINS]
    for d in DOMAINS:
        trace.sections[d] = results[d][1]
    report = compile_report(library, sections, ledger)
    trace.node_seconds["compile"] = time.perf_counter() - t0

    problems = validate_report(report, config.max_loop_depth)
    if problems:
        raise RuntimeError(f"compiled report failed validation: {problems}")
    return report, trace
