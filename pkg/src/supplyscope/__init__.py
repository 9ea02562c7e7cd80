"""Evidence-grounded supply-chain risk assessment for open-source libraries."""

from supplyscope.model import (
    DOMAINS,
    AssessmentReport,
    Category,
    DomainAssessment,
    EvidenceItem,
    Library,
    RiskDomain,
    RiskFactorRow,
    validate_report,
)
from supplyscope.rubric import aggregate_trust, category_average, score_domain, score_metrics

__version__ = "0.1.0"

__all__ = [
    "DOMAINS",
    "AssessmentReport",
    "Category",
    "DomainAssessment",
    "EvidenceItem",
    "Library",
    "RiskDomain",
    "RiskFactorRow",
    "aggregate_trust",
    "category_average",
    "score_domain",
    "score_metrics",
    "validate_report",
]
