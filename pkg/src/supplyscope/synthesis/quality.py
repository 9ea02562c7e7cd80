from __future__ import annotations

from dataclasses import dataclass

from supplyscope.model import MIN_ROWS_PER_SECTION, is_quantified
from supplyscope.synthesis.concepts import KEY_CONCEPTS, concepts_hit
from supplyscope.synthesis.table import SectionDraft

COVERAGE_GAP = "insufficient factor coverage"


@dataclass(frozen=True)
class QualityVerdict:
    passed: bool
    gaps: tuple[str, ...] = ()
    #: indices of rows whose Observed cell has no quantifiable token
    unquantified: tuple[int, ...] = ()
    #: key concepts not matched by any row
    uncovered: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def quality_check(draft: SectionDraft) -> QualityVerdict:
    """Completeness gate for a section draft.

    Fails with one gap string per unmet condition: row floor, quantified
    observations, citations on evidenced rows, and key-concept coverage.
    """
    gaps: list[str] = []
    if len(draft.rows) < MIN_ROWS_PER_SECTION:
        gaps.append(COVERAGE_GAP)
    unquantified = []
    for i, row in enumerate(draft.rows):
        if not is_quantified(row.observed):
            unquantified.append(i)
            gaps.append(f"quantification mandate: specific metric needed for {row.factor}")
        if not row.missing_info and not row.citations:
            gaps.append(f"citation needed for {row.factor}")
    covered: set[str] = set()
    for row in draft.rows:
        covered |= concepts_hit(draft.domain, f"{row.factor} {row.observed}")
    uncovered = [c for c in KEY_CONCEPTS[draft.domain] if c not in covered]
    gaps += [f"{c} unknown" for c in uncovered]
    return QualityVerdict(not gaps, tuple(gaps), tuple(unquantified), tuple(uncovered))
