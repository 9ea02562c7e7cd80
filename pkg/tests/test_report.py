from dataclasses import replace

import pytest

from supplyscope.evidence import EvidenceLedger
from supplyscope.model import DOMAINS, EvidenceItem, RiskDomain, RiskFactorRow, RowRef, validate_report
from supplyscope.report import (
    WITHHELD,
    ReportError,
    compile_report,
    load_report,
    novel_critical_rows,
    parse_report,
    redact,
    render_report,
    report_paths,
    write_report,
)

from conftest import WHEN, make_report


def test_dashboard_and_emergency_issues():
    report = make_report((5, 1, 3, 1, 3))
    assert report.summary.dashboard == tuple(zip(DOMAINS, (5, 1, 3, 1, 3)))
    domains = {ref.domain for ref in report.summary.emergency_issues}
    assert domains == {RiskDomain.SECURITY, RiskDomain.DEPENDENCY}
    assert all(report.row(r).rating == 1 for r in report.summary.emergency_issues)


def test_all_fives_no_emergencies():
    report = make_report((5, 5, 5, 5, 5))
    assert report.summary.emergency_issues == ()
    assert report.summary.prioritized_controls == ()
    assert "No controls required" in report.summary.mitigation_strategy


def test_controls_ordered_by_rating():
    report = make_report((2, 4, 1, 3, 5))
    ratings = [pc.rating for pc in report.summary.prioritized_controls]
    assert ratings == sorted(ratings)
    assert ratings[0] == 1
    for pc in report.summary.prioritized_controls:
        assert report.row(pc.ref).control == pc.control


def test_duplicate_controls_collapsed():
    ev = EvidenceItem.create("https://e", "x", "web-search", "q", WHEN)
    sections = []
    from supplyscope.model import DomainAssessment
    for d in DOMAINS:
        rows = tuple(RiskFactorRow(f"f{i}", "1", 3, "j", "Publish an SBOM", (ev.id,)) for i in range(3))
        sections.append(DomainAssessment(d, rows, 3))
    report = compile_report(make_report().library, sections, EvidenceLedger([ev]))
    assert len(report.summary.prioritized_controls) == 1


def test_compile_requires_all_domains():
    report = make_report()
    with pytest.raises(ReportError, match="Regulatory"):
        compile_report(report.library, report.sections[:4], [])
    with pytest.raises(ReportError, match="duplicate"):
        compile_report(report.library, report.sections + report.sections[:1], [])


def test_compile_reorders_sections():
    report = make_report((1, 2, 3, 4, 5))
    again = compile_report(report.library, tuple(reversed(report.sections)), report.evidence)
    assert again == report


def test_structured_round_trip_and_determinism():
    report = make_report((4, 2, 3, 1, 5))
    blob = render_report(report, "structured-data")
    assert parse_report(blob) == report
    assert render_report(report, "json") == blob


def test_human_text_one_table_per_domain():
    text = render_report(make_report(), "human-text").decode()
    assert text.count("| Factor | Observed | Rating | Justification | Control |") == 5
    assert "## Executive summary" in text and "### Risk dashboard" in text
    assert render_report(make_report(), "markdown").decode() == text


def test_unknown_format():
    with pytest.raises(ReportError):
        render_report(make_report(), "pdf")


def test_write_and_load(tmp_path):
    report = make_report()
    paths = write_report(report, tmp_path / "out")
    assert paths == report_paths(report.library, tmp_path / "out")
    assert paths["json"].name == "lib-2025-05-01-report.json"
    assert paths["markdown"].name == "lib-2025-05-01-report.md"
    assert load_report(paths["json"]) == report


# redaction ----------------------------------------------------------------

def _flagged_report():
    report = make_report((5, 1, 5, 5, 5))
    advisory = EvidenceItem.create("https://osv.dev/v", "CVE-1", "vulnerability-db", "q", WHEN)
    sec = report.sections[1]
    rows = list(sec.rows)
    rows[1] = replace(rows[1], citations=(advisory.id,))  # published advisory, not novel
    report = replace(report, sections=(report.sections[0], replace(sec, rows=tuple(rows))) + report.sections[2:],
                     evidence=tuple(sorted(report.evidence + (advisory,), key=lambda e: e.id)))
    return report


def test_public_is_identity():
    report = _flagged_report()
    assert redact(report, "public") is report


def test_disclosure_hold_redacts_novel_criticals_only():
    report = _flagged_report()
    flagged = novel_critical_rows(report)
    assert flagged == [RowRef(RiskDomain.SECURITY, 0), RowRef(RiskDomain.SECURITY, 2)]
    held = redact(report, "disclosure-hold")
    assert held.scores == report.scores and held.trust_sum == report.trust_sum
    for ref in flagged:
        assert held.row(ref).observed == WITHHELD and held.row(ref).justification == WITHHELD
        assert held.row(ref).rating == 1
    assert held.row(RowRef(RiskDomain.SECURITY, 1)) == report.row(RowRef(RiskDomain.SECURITY, 1))
    assert validate_report(held) == []


def test_unknown_policy():
    with pytest.raises(ReportError):
        redact(make_report(), "secret")
