from __future__ import annotations

from typing import Sequence

from supplyscope.model import EvidenceItem, Library, RiskDomain
from supplyscope.synthesis.concepts import KEY_CONCEPTS, RATING_GUIDE
from supplyscope.synthesis.table import HEADER, MISSING_TAG

NO_EVIDENCE = "No evidence retrieved for this domain."


def _header(task: str, domain: RiskDomain, library: Library) -> list[str]:
    return [
        f"Task: {task}",
        f"Library: {library.name}",
        f"Repository: {library.repo_url}",
        f"Category: {library.category.value}",
        f"Domain: {RiskDomain(domain).value}",
    ]


def build_prompt(
    domain: RiskDomain,
    library: Library,
    evidence: Sequence[EvidenceItem],
    iteration: int = 1,
    gaps: Sequence[str] = (),
) -> str:
    """Synthesis prompt for one domain section. Pure function of its inputs."""
    domain = RiskDomain(domain)
    low, medium, high = RATING_GUIDE[domain]
    lines = _header("section", domain, library)
    lines.append(f"Iteration: {iteration}")
    lines += [
        "",
        f"Assess the {domain.value} risk of {library.name}. Cover each key concept below "
        "with at least one factor row:",
    ]
    lines += [f"- {c}" for c in KEY_CONCEPTS[domain]]
    lines += [
        "",
        "Ratings: 5 = low risk, 3 = medium risk, 1 = high risk; use 2 or 4 only when the",
        "evidence falls between two levels.",
        f"- 5: {low}",
        f"- 3: {medium}",
        f"- 1: {high}",
        "",
        "Rules:",
        "1. Report every factor as one row of the table below and nowhere else.",
        "2. Quantify: each Observed cell states a concrete, checkable metric such as a count,",
        "   a date or a version number. Qualitative summaries are rejected.",
        "3. Cite: end every Justification with the bracketed ids of the evidence supporting",
        "   it, for example [ev-0123456789ab, ev-ba9876543210]. Only ids listed below are valid.",
        f"4. Missing information: when evidence for a factor is unavailable write \"not found\" in",
        f"   Observed, rate it \"1 {MISSING_TAG}\" and leave the citation list empty: []. Missing",
        "   information is itself a high-risk finding.",
        "",
        "| " + " | ".join(HEADER) + " |",
        "|" + "---|" * len(HEADER),
        "",
    ]
    if gaps:
        lines.append("Gaps left by the previous draft (address each):")
        lines += [f"- {g}" for g in gaps]
        lines.append("")
    lines.append("Evidence:")
    if not evidence:
        lines.append(NO_EVIDENCE)
    for item in sorted(evidence, key=lambda e: e.id):
        lines.append(f"[{item.id}] ({item.source_class.value}) {item.url}")
        lines.append(f"    {item.excerpt}")
    return "\n".join(lines) + "\n"


def build_plan_prompt(domain: RiskDomain, library: Library, base_queries: Sequence[str]) -> str:
    """Ask a provider for extra search queries; answers are ``- query`` lines."""
    lines = _header("plan", domain, library)
    lines += ["", "Existing queries:"] + [f"- {q}" for q in base_queries]
    lines += ["", "Suggest additional targeted search queries, one per line prefixed with '- '."]
    return "\n".join(lines) + "\n"


def parse_prompt_header(prompt: str) -> dict[str, str]:
    """Read the ``Key: value`` header block written by the prompt builders."""
    out: dict[str, str] = {}
    for line in prompt.splitlines():
        if not line.strip():
            break
        key, sep, value = line.partition(":")
        if sep:
            out[key.strip().lower()] = value.strip()
    return out
