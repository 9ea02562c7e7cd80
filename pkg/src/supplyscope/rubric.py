"""Deterministic risk rubric: observed metrics -> factor bands -> domain scores.

Bands follow the three-level criteria (5 low risk, 3 medium, 1 high). Any
field a criterion needs but which is unknown yields band 1 with the reason
``"missing information"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from supplyscope.model import RiskDomain

MISSING = "missing information"

# Allowed values per enumerated metric, worst first. The order doubles as the
# improvement direction used by monotonicity checks.
ENUM_LEVELS: dict[str, tuple[str, ...]] = {
    "license_family": ("proprietary-terms", "strong-copyleft", "unclear", "weak-copyleft", "permissive"),
    "patent_grant": ("unclear", "absent", "explicit"),
    "security_policy": ("missing", "basic", "robust"),
    "sbom": ("none", "partial", "full"),
    "transitive_visibility": ("none", "partial", "full"),
    "compliance_docs": ("missing", "incomplete", "clear"),
    "audit_trail": ("missing", "partial", "complete"),
}


class RubricError(ValueError):
    pass


@dataclass(frozen=True)
class ObservedMetrics:
    """Structured observations for one library. ``None`` means unknown."""

    license_family: str | None = None
    patent_grant: str | None = None
    cve_count_24mo: int | None = None
    cve_count_12mo_minor: int | None = None
    has_critical_cve: bool | None = None
    security_policy: str | None = None
    median_fix_days: float | None = None
    active_contributors: int | None = None
    release_cadence_days: float | None = None
    issue_first_response_hours: float | None = None
    sbom: str | None = None
    direct_dependency_count: int | None = None
    transitive_visibility: str | None = None
    auto_update_evidence: bool | None = None
    vulnerable_transitive_known: bool | None = None
    compliance_docs: str | None = None
    audit_trail: str | None = None

    def __post_init__(self) -> None:
        for name, levels in ENUM_LEVELS.items():
            value = getattr(self, name)
            if value is not None and value not in levels:
                raise RubricError(f"{name}: {value!r} not one of {levels}")
        for name in ("cve_count_24mo", "cve_count_12mo_minor", "active_contributors",
                     "direct_dependency_count", "median_fix_days", "issue_first_response_hours"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise RubricError(f"{name} must be >= 0")
        if self.release_cadence_days is not None and self.release_cadence_days <= 0:
            raise RubricError("release_cadence_days must be > 0")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ObservedMetrics":
        known = {f.name for f in fields(cls)}
        norm = {k.replace("-", "_"): v for k, v in d.items()}
        unknown = set(norm) - known
        if unknown:
            raise RubricError(f"unknown metric fields: {sorted(unknown)}")
        return cls(**norm)


@dataclass(frozen=True)
class FactorBand:
    factor: str
    band: int
    reason: str

    def __post_init__(self) -> None:
        if self.band not in (1, 3, 5):
            raise RubricError(f"band must be 1, 3 or 5, got {self.band}")


@dataclass(frozen=True)
class Rubric:
    """Threshold set; defaults ship in ``data/rubric.json``."""

    version: str
    security: dict[str, float]
    maintenance: dict[str, float]
    dependency: dict[str, float]

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Rubric":
        if path is None:
            text = resources.files("supplyscope").joinpath("data/rubric.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        raw = json.loads(text)
        return cls(
            version=str(raw["version"]),
            security=dict(raw["security"]),
            maintenance=dict(raw["maintenance"]),
            dependency=dict(raw["dependency"]),
        )


DEFAULT_RUBRIC = Rubric.load()


def _three_way(factor: str, value, low, medium) -> FactorBand:
    if value is None:
        return FactorBand(factor, 1, MISSING)
    if low(value):
        return FactorBand(factor, 5, f"{value} meets low-risk threshold")
    if medium(value):
        return FactorBand(factor, 3, f"{value} meets medium-risk threshold")
    return FactorBand(factor, 1, f"{value} falls in high-risk range")


def _level(factor: str, value: str | None, table: dict[str, int]) -> FactorBand:
    if value is None:
        return FactorBand(factor, 1, MISSING)
    return FactorBand(factor, table[value], value)


def _license(m: ObservedMetrics, r: Rubric) -> list[FactorBand]:
    family = {
        "permissive": 5,
        "weak-copyleft": 3,
        "unclear": 3,
        "strong-copyleft": 1,
        "proprietary-terms": 1,
    }
    # "absent" means the licence carries no patent clause; treated as not applicable.
    patent = {"explicit": 5, "absent": 5, "unclear": 3}
    return [
        _level("license terms", m.license_family, family),
        _level("patent grant", m.patent_grant, patent),
    ]


def _cve_history(m: ObservedMetrics, r: Rubric) -> FactorBand:
    factor = "CVE history"
    cap = r.security["medium_max_cves"]
    if m.has_critical_cve:
        return FactorBand(factor, 1, "critical CVE present")
    if m.cve_count_24mo is None:
        return FactorBand(factor, 1, MISSING)
    if m.cve_count_24mo == 0:
        return FactorBand(factor, 5, "no CVEs in window")
    if m.has_critical_cve is None or m.cve_count_12mo_minor is None:
        return FactorBand(factor, 1, MISSING)
    if m.cve_count_24mo <= cap and m.cve_count_12mo_minor <= cap:
        return FactorBand(factor, 3, f"{m.cve_count_24mo} minor CVEs")
    return FactorBand(factor, 1, f"multiple CVEs ({m.cve_count_24mo})")


def _security(m: ObservedMetrics, r: Rubric) -> list[FactorBand]:
    s = r.security
    return [
        _cve_history(m, r),
        _level("security policy", m.security_policy, {"robust": 5, "basic": 3, "missing": 1}),
        _three_way(
            "fix latency",
            m.median_fix_days,
            lambda v: v < s["fix_days_low_below"],
            lambda v: v <= s["fix_days_medium_max"],
        ),
    ]


def _maintenance(m: ObservedMetrics, r: Rubric) -> list[FactorBand]:
    t = r.maintenance
    return [
        _three_way(
            "active contributors",
            m.active_contributors,
            lambda v: v > t["contributors_low_above"],
            lambda v: v >= t["contributors_medium_min"],
        ),
        _three_way(
            "release cadence",
            m.release_cadence_days,
            lambda v: v <= t["release_days_low_max"],
            lambda v: v <= t["release_days_medium_max"],
        ),
        _three_way(
            "issue response",
            m.issue_first_response_hours,
            lambda v: v < t["response_hours_low_below"],
            lambda v: v <= t["response_hours_medium_max"],
        ),
    ]


def _dependency(m: ObservedMetrics, r: Rubric) -> list[FactorBand]:
    t = r.dependency
    if m.vulnerable_transitive_known:
        transitive = FactorBand("transitive dependencies", 1, "known vulnerable transitive dependency")
    elif m.vulnerable_transitive_known is None:
        transitive = FactorBand("transitive dependencies", 1, MISSING)
    else:
        transitive = _level(
            "transitive dependencies", m.transitive_visibility, {"full": 5, "partial": 3, "none": 1}
        )
    if m.auto_update_evidence is None:
        updates = FactorBand("automated updates", 1, MISSING)
    elif m.auto_update_evidence:
        updates = FactorBand("automated updates", 5, "automated update tooling present")
    else:
        updates = FactorBand("automated updates", int(t["auto_update_absent_band"]), "no automated updates")
    return [
        _level("SBOM", m.sbom, {"full": 5, "partial": 3, "none": 1}),
        _three_way(
            "direct dependency count",
            m.direct_dependency_count,
            lambda v: v < t["direct_low_below"],
            lambda v: v <= t["direct_medium_max"],
        ),
        transitive,
        updates,
    ]


def _regulatory(m: ObservedMetrics, r: Rubric) -> list[FactorBand]:
    return [
        _level("compliance documentation", m.compliance_docs, {"clear": 5, "incomplete": 3, "missing": 1}),
        _level("audit trail", m.audit_trail, {"complete": 5, "partial": 3, "missing": 1}),
    ]


_BANDERS = {
    RiskDomain.LICENSE: _license,
    RiskDomain.SECURITY: _security,
    RiskDomain.MAINTENANCE: _maintenance,
    RiskDomain.DEPENDENCY: _dependency,
    RiskDomain.REGULATORY: _regulatory,
}


def band_factors(
    domain: RiskDomain, metrics: ObservedMetrics, rubric: Rubric = DEFAULT_RUBRIC
) -> list[FactorBand]:
    return _BANDERS[RiskDomain(domain)](metrics, rubric)


def _min_plus_majority(values: Sequence[int]) -> int:
    if not values:
        raise RubricError("no factors banded")
    low = min(values)
    above = sum(1 for v in values if v > low)
    return low + 1 if 2 * above > len(values) else low


def score_domain(bands: Iterable[FactorBand | int]) -> int:
    """Domain score from factor bands.

    The score is the lowest band, raised by one when strictly more than half
    of the bands sit above it. Outputs are always in ``{min, min + 1}``.
    """
    values = [b.band if isinstance(b, FactorBand) else int(b) for b in bands]
    for v in values:
        if v not in (1, 3, 5):
            raise RubricError(f"band must be 1, 3 or 5, got {v}")
    return _min_plus_majority(values)


def band_rating(rating: int) -> int:
    """Floor an advisory 1..5 rating onto the {1, 3, 5} band scale."""
    if rating not in (1, 2, 3, 4, 5):
        raise RubricError(f"rating {rating} out of range 1..5")
    return rating - 1 if rating in (2, 4) else rating


def score_ratings(ratings: Iterable[int]) -> int:
    return score_domain(band_rating(r) for r in ratings)


def score_metrics(domain: RiskDomain, metrics: ObservedMetrics, rubric: Rubric = DEFAULT_RUBRIC) -> int:
    return score_domain(band_factors(domain, metrics, rubric))


def aggregate_trust(scores: Sequence[int], mode: str = "sum") -> int | Fraction:
    """Composite trust over the five domain scores (Li, Se, Ma, De, Re).

    ``sum`` gives the 5..25 scale used on the leaderboard; ``mean`` gives the
    exact 1..5 rational.
    """
    scores = list(scores)
    if len(scores) != 5:
        raise RubricError(f"expected 5 domain scores, got {len(scores)}")
    for s in scores:
        if s not in (1, 2, 3, 4, 5):
            raise RubricError(f"domain score {s} out of range 1..5")
    total = sum(scores)
    if mode == "sum":
        return total
    if mode == "mean":
        return Fraction(total, 5)
    raise RubricError(f"unknown aggregation mode: {mode!r}")


def _exact(value: int | float | Fraction | Decimal) -> Fraction:
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    return Fraction(value)


def round1(value: int | float | Fraction | Decimal) -> float:
    """Round half-up to one decimal place, exactly."""
    q = _exact(value)
    tenths = (abs(q) * 10 + Fraction(1, 2)).__floor__()
    return float(Decimal(tenths if q >= 0 else -tenths) / 10)


def category_average(values: Sequence[int | float]) -> float:
    if not values:
        raise RubricError("cannot average an empty list")
    mean = sum((_exact(v) for v in values), Fraction(0)) / len(values)
    return round1(mean)
