"""Report compilation, rendering and disclosure redaction."""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from supplyscope.model import (
    DOMAINS,
    AssessmentReport,
    DomainAssessment,
    ExecSummary,
    Library,
    PrioritizedControl,
    RowRef,
    SourceClass,
    dumps,
    format_ts,
)
from supplyscope.rubric import aggregate_trust
from supplyscope.synthesis.table import render_rows

WITHHELD = "[withheld under responsible disclosure hold]"
FORMATS = ("json", "markdown")


class ReportError(ValueError):
    pass


def _prioritized(sections: Sequence[DomainAssessment]) -> list[PrioritizedControl]:
    picked: list[PrioritizedControl] = []
    for s in sections:
        for i, row in enumerate(s.rows):
            if row.rating < 5 and row.control.strip():
                picked.append(PrioritizedControl(RowRef(s.domain, i), row.rating, row.control))
    picked.sort(key=lambda pc: (pc.rating, pc.ref.sort_key()))
    seen: set[str] = set()
    out = []
    for pc in picked:
        key = " ".join(pc.control.lower().split())
        if key not in seen:
            seen.add(key)
            out.append(pc)
    return out


def _mitigation(controls: Sequence[PrioritizedControl]) -> str:
    tiers = (
        ("Immediate", (1,)),
        ("Near term", (2, 3)),
        ("Monitor", (4,)),
    )
    lines = []
    for label, ratings in tiers:
        picked = [f"{pc.control} ({pc.ref})" for pc in controls if pc.rating in ratings]
        if picked:
            lines.append(f"{label}: " + "; ".join(picked))
    return "\n".join(lines) or "No controls required; continue periodic monitoring."


def compile_report(library: Library, sections: Sequence[DomainAssessment], ledger) -> AssessmentReport:
    """Assemble the final report and its executive summary.

    *ledger* is any iterable of evidence items (an ``EvidenceLedger`` works).
    Sections are reordered into canonical domain order.
    """
    by_domain = {}
    for s in sections:
        if s.domain in by_domain:
            raise ReportError(f"duplicate domain: {s.domain.value}")
        by_domain[s.domain] = s
    missing = [d.value for d in DOMAINS if d not in by_domain]
    if missing:
        raise ReportError(f"missing domain(s): {', '.join(missing)}")
    ordered = [by_domain[d] for d in DOMAINS]

    emergency = [
        RowRef(s.domain, i) for s in ordered for i, row in enumerate(s.rows) if row.rating == 1
    ]
    controls = _prioritized(ordered)
    summary = ExecSummary(
        dashboard=tuple((s.domain, s.score) for s in ordered),
        emergency_issues=tuple(emergency),
        prioritized_controls=tuple(controls),
        mitigation_strategy=_mitigation(controls),
    )
    scores = [s.score for s in ordered]
    evidence = sorted(ledger.items() if hasattr(ledger, "items") else ledger, key=lambda e: e.id)
    return AssessmentReport(
        library=library,
        sections=tuple(ordered),
        summary=summary,
        trust_sum=aggregate_trust(scores, "sum"),
        trust_mean=aggregate_trust(scores, "mean"),
        evidence=tuple(evidence),
    )


def _markdown(report: AssessmentReport) -> str:
    lib = report.library
    out = [
        f"# Risk assessment: {lib.name}",
        "",
        f"- Repository: {lib.repo_url}",
        f"- Category: {lib.category.value}",
        f"- Version: {lib.version or 'unspecified'}",
        f"- Assessed: {format_ts(lib.assessed_at)}",
        f"- Trust score: {report.trust_sum} / 25 (mean {float(report.trust_mean):.1f} / 5)",
        "",
        "## Executive summary",
        "",
        "### Risk dashboard",
        "",
    ]
    out += [f"- {d.value} ({d.short}): {score}" for d, score in report.summary.dashboard]
    out += ["", "### Emergency issues", ""]
    if report.summary.emergency_issues:
        for ref in report.summary.emergency_issues:
            row = report.row(ref)
            out.append(f"- {ref}: {row.factor}: {row.observed}")
    else:
        out.append("- none")
    out += ["", "### Prioritized controls", ""]
    if report.summary.prioritized_controls:
        for n, pc in enumerate(report.summary.prioritized_controls, 1):
            out.append(f"{n}. [rating {pc.rating}] {pc.ref.domain.value}: {pc.control}")
    else:
        out.append("- none")
    out += ["", "### Mitigation strategy", "", report.summary.mitigation_strategy, ""]
    for s in report.sections:
        out += [f"## {s.domain.value} (score {s.score}, {s.iterations_used} iteration(s))", ""]
        if s.narrative:
            out += [s.narrative, ""]
        out.append(render_rows(s.rows).rstrip("\n"))
        out.append("")
    out += ["## Evidence", ""]
    for e in report.evidence:
        out.append(f"- [{e.id}] {e.url} ({e.source_class.value}, retrieved {format_ts(e.retrieved_at)})")
        out.append(f"  > {e.excerpt}")
    return "\n".join(out).rstrip("\n") + "\n"


def render_report(report: AssessmentReport, fmt: str = "json") -> bytes:
    """``json`` is the canonical machine form; ``markdown`` the human form."""
    if fmt in ("json", "structured-data"):
        return dumps(report).encode("utf-8")
    if fmt in ("markdown", "md", "human-text"):
        return _markdown(report).encode("utf-8")
    raise ReportError(f"unknown report format: {fmt!r}")


def parse_report(data: bytes | str) -> AssessmentReport:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return AssessmentReport.from_dict(json.loads(data))


def load_report(path: str | Path) -> AssessmentReport:
    return parse_report(Path(path).read_bytes())


def report_paths(library: Library, out_dir: str | Path) -> dict[str, Path]:
    stem = f"{library.slug}-{library.assessed_at:%Y-%m-%d}-report"
    out = Path(out_dir)
    return {"json": out / f"{stem}.json", "markdown": out / f"{stem}.md"}


def write_report(report: AssessmentReport, out_dir: str | Path) -> dict[str, Path]:
    paths = report_paths(report.library, out_dir)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    for fmt, path in paths.items():
        path.write_bytes(render_report(report, fmt))
    return paths


def novel_critical_rows(report: AssessmentReport) -> list[RowRef]:
    """Rating-1 findings with evidence, none of it from a vulnerability database."""
    advisories = {e.id for e in report.evidence if e.source_class is SourceClass.VULNERABILITY_DB}
    return [
        ref
        for ref, row in report.iter_rows()
        if row.rating == 1
        and not row.missing_info
        and not any(c in advisories for c in row.citations)
    ]


def redact(report: AssessmentReport, policy: str = "public") -> AssessmentReport:
    if policy == "public":
        return report
    if policy != "disclosure-hold":
        raise ReportError(f"unknown redaction policy: {policy!r}")
    flagged = set(novel_critical_rows(report))
    if not flagged:
        return report
    sections = []
    for s in report.sections:
        rows = tuple(
            replace(row, observed=WITHHELD, justification=WITHHELD)
            if RowRef(s.domain, i) in flagged
            else row
            for i, row in enumerate(s.rows)
        )
        sections.append(replace(s, rows=rows))
    return replace(report, sections=tuple(sections))
