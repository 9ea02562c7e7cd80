"""Per-domain search query generation."""

from __future__ import annotations

from urllib.parse import urlparse

from supplyscope.model import Library, RiskDomain

TEMPLATES: dict[RiskDomain, tuple[str, ...]] = {
    RiskDomain.LICENSE: (
        "{name} license terms {repo}",
        "{name} license commercial use restrictions",
        "{name} patent grant license clause",
        "{name} license compatibility third-party notices",
    ),
    RiskDomain.SECURITY: (
        "{name} CVE security advisories",
        "{name} security policy SECURITY.md vulnerability disclosure",
        "{name} vulnerability patch fix latency",
        "{name} security history incidents {repo}",
    ),
    RiskDomain.MAINTENANCE: (
        "{name} release history cadence {repo}",
        "{name} active contributors commit activity",
        "{name} project governance maintainers",
        "{name} issue response time resolution",
    ),
    RiskDomain.DEPENDENCY: (
        "{name} SBOM software bill of materials",
        "{name} direct dependencies requirements {repo}",
        "{name} transitive dependency vulnerabilities",
        "{name} dependency pinning automated updates supply chain",
    ),
    RiskDomain.REGULATORY: (
        "{name} GDPR AI Act compliance documentation",
        "{name} explainability transparency documentation",
        "{name} audit logging trail telemetry data collection",
    ),
}


def repo_path(url: str) -> str:
    """``owner/repo`` for hosting-platform URLs, else the URL host."""
    parts = urlparse(url)
    segments = [s for s in parts.path.split("/") if s]
    if len(segments) >= 2:
        return f"{segments[0]}/{segments[1].removesuffix('.git')}"
    return parts.netloc


def generate_queries(
    domain: RiskDomain, library: Library, iteration: int, gaps: list[str] | tuple[str, ...] = ()
) -> list[str]:
    """Search queries for one domain at one loop iteration.

    The first iteration instantiates the domain templates. Later iterations
    emit one refined query per outstanding gap, falling back to the templates
    when no gaps were reported.
    """
    if iteration < 1:
        raise ValueError("iteration must be >= 1")
    if iteration > 1 and gaps:
        seen: list[str] = []
        for gap in gaps:
            q = f"{library.name} {' '.join(gap.split())}"
            if q not in seen:
                seen.append(q)
        return seen
    repo = repo_path(library.repo_url)
    return [t.format(name=library.name, repo=repo) for t in TEMPLATES[RiskDomain(domain)]]
