import json
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from supplyscope.benchmark import (
    DEFAULT_KEYWORDS,
    BenchmarkError,
    BenchmarkResult,
    KeywordMap,
    MatchMatrix,
    ScorecardError,
    ScorecardUnavailable,
    benchmark,
    compute_alignment,
    compute_novelty,
    ingest_scorecard,
    load_scorecard,
    match_findings,
    normalize_factor,
    run_scorecard,
)
from supplyscope.model import DOMAINS, RiskDomain, RowRef
from supplyscope.synthesis import SynthesisProvider

from conftest import SCORECARDS, make_report
from reference_tables import ALIGNMENT_PAIRS


def doc(scores):
    return {"repo": {"name": "github.com/o/r"}, "checks": [
        {"name": n, "score": s, "reason": ""} for n, s in scores.items()]}


# ingestion ----------------------------------------------------------------

def test_applicable_counts():
    names = sorted(DEFAULT_KEYWORDS.checks)[:18]
    assert len(ingest_scorecard(doc({n: 5 for n in names})).applicable) == 18
    scores = {n: 5 for n in names}
    scores[names[3]] = -1
    assert len(ingest_scorecard(doc(scores)).applicable) == 17


@pytest.mark.parametrize("name, field", [
    ("malformed-no-checks.json", "checks: field missing"),
    ("malformed-score.json", "checks[1].score"),
    ("malformed-truncated.json", "not JSON"),
])
def test_malformed_files_name_the_field(name, field):
    with pytest.raises(ScorecardError, match=field.replace("[", r"\[").replace("]", r"\]")):
        load_scorecard(SCORECARDS / name)


def test_duplicate_check_rejected():
    with pytest.raises(ScorecardError, match="duplicate"):
        ingest_scorecard({"checks": [{"name": "SAST", "score": 1}, {"name": "SAST", "score": 2}]})


@pytest.mark.parametrize("name, n, applicable", [("pytorch", 20, 16), ("jax", 20, 17), ("examplelib", 18, 17)])
def test_vendored_scorecards(name, n, applicable):
    sc = load_scorecard(SCORECARDS / f"{name}.json")
    assert len(sc.checks) == n and len(sc.applicable) == applicable
    assert sc.repo.startswith("https://github.com/") and sc.version == "v5.1.1"


def test_run_scorecard_missing_executable():
    with pytest.raises(ScorecardUnavailable, match="not found on PATH"):
        run_scorecard("https://github.com/o/r", executable="definitely-not-installed-scorecard")


# matching -----------------------------------------------------------------

def report_with(factors):
    """Report whose rows carry the given (domain, index) -> factor names."""
    return make_report((3, 3, 3, 3, 3), factors=factors)


def test_signed_release_keyword():
    r = report_with({(RiskDomain.DEPENDENCY, 0): "Releases are not signed (no signatures found)"})
    sc = ingest_scorecard(doc({"Signed-Releases": 0}))
    m = match_findings(r, sc)
    assert m.checks["Signed-Releases"] == (RowRef(RiskDomain.DEPENDENCY, 0),)


def test_empty_report_zero_matches():
    r = make_report()
    empty = replace(r, sections=tuple(replace(s, rows=()) for s in r.sections))
    m = match_findings(empty, load_scorecard(SCORECARDS / "jax.json"))
    assert m.matched == 0 and m.applicable == 17


def test_not_applicable_checks_excluded():
    r = report_with({(RiskDomain.DEPENDENCY, 0): "SBOM availability"})
    m = match_findings(r, ingest_scorecard(doc({"SBOM": -1, "SAST": 3})))
    assert set(m.checks) == {"SAST"}


class Suggests(SynthesisProvider):
    def __init__(self, text):
        self.text = text

    def synthesize(self, prompt):
        assert prompt.startswith("Task: match")
        return self.text


def test_provider_assisted_superset():
    r = report_with({(RiskDomain.SECURITY, 0): "Code review coverage", (RiskDomain.LICENSE, 0): "Licence"})
    sc = load_scorecard(SCORECARDS / "pytorch.json")
    plain = match_findings(r, sc)
    assisted = match_findings(r, sc, Suggests(
        "- Fuzzing -> Security#1\nBinary-Artifacts -> Maintenance#2\nbogus line\nSAST -> Nowhere#1\n"
        "Webhooks -> Security#0\nCI-Tests -> Security#99\n"))
    for name, refs in plain.checks.items():
        assert set(refs) <= set(assisted.checks[name])
    assert assisted.checks["Fuzzing"] == (RowRef(RiskDomain.SECURITY, 1),)
    assert "Webhooks" not in assisted.checks  # not applicable, cannot be added
    assert assisted.checks["CI-Tests"] == ()
    assert assisted.matched == plain.matched + 2


def test_matching_deterministic_over_corpus(demo_run):
    report = demo_run[0]
    for path in sorted(SCORECARDS.glob("[!m]*.json")):
        sc = load_scorecard(path)
        a, b = match_findings(report, sc), match_findings(report, sc)
        assert a == b
        assert not set(compute_novelty(report, a)) & a.matched_rows()


def test_custom_keyword_map(tmp_path):
    path = tmp_path / "k.json"
    path.write_text(json.dumps({"version": "x", "checks": {"SAST": ["lint"]}}))
    km = KeywordMap.load(path)
    r = report_with({(RiskDomain.SECURITY, 0): "Linting"})
    m = match_findings(r, ingest_scorecard(doc({"SAST": 1, "Fuzzing": 0})), keywords=km)
    assert m.checks == {"SAST": (RowRef(RiskDomain.SECURITY, 0),), "Fuzzing": ()}


# alignment ----------------------------------------------------------------

@pytest.mark.parametrize("matched, applicable, pct", ALIGNMENT_PAIRS)
def test_alignment_pairs(matched, applicable, pct):
    assert compute_alignment(matched, applicable) == pct


def test_alignment_edges():
    assert compute_alignment(0, 17) == 0.0
    assert compute_alignment(17, 17) == 100.0
    with pytest.raises(BenchmarkError, match="no applicable"):
        compute_alignment(0, 0)
    with pytest.raises(BenchmarkError):
        compute_alignment(5, 4)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 60), st.data())
def test_alignment_monotone(applicable, data):
    matched = data.draw(st.integers(0, applicable))
    a = compute_alignment(matched, applicable)
    assert 0.0 <= a <= 100.0
    if matched < applicable:
        assert compute_alignment(matched + 1, applicable) > a
    assert compute_alignment(matched, applicable + 1) <= a


# novelty ------------------------------------------------------------------

def test_all_rows_matched_yields_zero():
    r = make_report((3, 3, 3, 3, 3))
    matrix = MatchMatrix({"X": tuple(ref for ref, _ in r.iter_rows())},
                         {ref: ("X",) for ref, _ in r.iter_rows()})
    assert compute_novelty(r, matrix) == []


def test_nineteen_unmatched_rows():
    from supplyscope.model import RiskFactorRow
    factors = {(d, i): f"{d.value} concern {i}" for d in DOMAINS for i in range(3)}
    r = make_report((3, 3, 3, 3, 2), factors=factors)
    sec = r.sections[1]
    extra = tuple(RiskFactorRow(f"extra {i}", "1", 1, "j", "c", sec.rows[0].citations) for i in range(4))
    r = replace(r, sections=(r.sections[0], replace(sec, rows=sec.rows + extra, score=1)) + r.sections[2:])
    res = benchmark(r, ingest_scorecard(doc({"Webhooks": 10})))
    assert res.matched == 0
    assert res.novelty_yield == 19


def test_duplicate_normalized_factor_counted_once():
    factors = {(RiskDomain.SECURITY, 0): "Patch latency", (RiskDomain.SECURITY, 1): "patch-latency!",
               (RiskDomain.SECURITY, 2): "PATCH   Latency"}
    r = make_report((1, 1, 5, 5, 5), factors=factors)
    novel = compute_novelty(r, match_findings(r, ingest_scorecard(doc({"Webhooks": 1}))))
    sec = [ref for ref in novel if ref.domain is RiskDomain.SECURITY]
    assert sec == [RowRef(RiskDomain.SECURITY, 0)]
    assert normalize_factor("patch-latency!") == "patch latency"


def test_high_rated_rows_not_novel():
    r = make_report((5, 5, 5, 5, 5))
    assert benchmark(r, ingest_scorecard(doc({"Webhooks": 1}))).novelty_yield == 0


# result -------------------------------------------------------------------

def test_result_round_trip_and_vacuous(demo_run):
    res = benchmark(demo_run[0], load_scorecard(SCORECARDS / "examplelib.json"))
    assert (res.matched, res.applicable, res.alignment_pct) == (15, 17, 88.2)
    again = BenchmarkResult.from_dict(json.loads(json.dumps(res.to_dict())))
    assert again == res
    r = make_report()
    empty = replace(r, sections=tuple(replace(s, rows=()) for s in r.sections))
    vac = benchmark(empty, load_scorecard(SCORECARDS / "examplelib.json"))
    assert vac.alignment_pct == 0.0 and vac.novelty_yield == 0
