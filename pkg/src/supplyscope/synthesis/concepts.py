"""Key concepts each domain section must cover, with matching keywords."""

from __future__ import annotations

import re

from supplyscope.model import RiskDomain

KEY_CONCEPTS: dict[RiskDomain, dict[str, tuple[str, ...]]] = {
    RiskDomain.LICENSE: {
        "legal terms": ("license", "licence", "terms"),
        "commercial use": ("commercial",),
        "patent grants": ("patent",),
        "license compliance": ("compliance", "compatib", "attribution", "notice"),
    },
    RiskDomain.SECURITY: {
        "known vulnerabilities": ("cve", "vulnerab", "advisor"),
        "security history": ("history", "incident", "past", "months", "since"),
        "patching": ("patch", "fix", "remediat"),
        "security policy adherence": ("policy", "security.md", "disclosure"),
    },
    RiskDomain.MAINTENANCE: {
        "release frequency": ("release",),
        "contributor activity": ("contributor", "committer", "maintainer"),
        "project governance": ("governance", "steering", "codeowners", "foundation"),
        "issue resolution": ("issue",),
    },
    RiskDomain.DEPENDENCY: {
        "SBOM availability": ("sbom", "bill of materials"),
        "transitive risks": ("transitive",),
        "supply chain controls": ("pinned", "pinning", "lockfile", "dependabot", "renovate",
                                  "supply chain", "automated update", "signing", "provenance"),
    },
    RiskDomain.REGULATORY: {
        "GDPR and AI Act alignment": ("gdpr", "ai act", "hipaa", "privacy"),
        "explainability": ("explainab", "interpretab", "transparen", "model card"),
        "audit readiness": ("audit",),
    },
}

RATING_GUIDE: dict[RiskDomain, tuple[str, str, str]] = {
    RiskDomain.LICENSE: (
        "permissive licence (MIT, Apache-2.0, BSD) with clear, compatible terms",
        "moderate restrictions or unclear patent provisions",
        "restrictive (GPL/AGPL), incompatible or otherwise legally concerning terms",
    ),
    RiskDomain.SECURITY: (
        "no CVEs in 24 months, robust security policy, fixes in under 7 days",
        "1-3 minor CVEs in 12 months, basic policy, fixes in 7-30 days",
        "critical or multiple CVEs, no security policy, or fixes slower than 30 days",
    ),
    RiskDomain.MAINTENANCE: (
        "more than 10 active contributors, monthly releases, issue response under 24 hours",
        "3-10 active contributors, quarterly releases, issue response in 1-7 days",
        "fewer than 3 active contributors, releases more than 6 months apart, or poor issue response",
    ),
    RiskDomain.DEPENDENCY: (
        "SBOM published, fewer than 20 direct dependencies, automated updates",
        "partial SBOM, 20-50 direct dependencies, some transitive visibility",
        "no SBOM, more than 50 direct dependencies, or known vulnerable transitive dependencies",
    ),
    RiskDomain.REGULATORY: (
        "clear compliance documentation and a complete audit trail",
        "incomplete compliance documentation or partial audit readiness",
        "missing compliance documentation or essential regulations unmet",
    ),
}


def _pattern(words: tuple[str, ...]) -> re.Pattern[str]:
    return re.compile("|".join(r"(?<![a-z0-9])" + re.escape(w) for w in words), re.IGNORECASE)


_PATTERNS = {d: {c: _pattern(w) for c, w in cs.items()} for d, cs in KEY_CONCEPTS.items()}


def concepts_hit(domain: RiskDomain, text: str) -> set[str]:
    return {c for c, pat in _PATTERNS[RiskDomain(domain)].items() if pat.search(text)}
