"""Scorecard ingestion and report-vs-Scorecard benchmarking.

Only the published Scorecard JSON result fields are consumed::

    {"date": ..., "repo": {"name": "github.com/org/repo"},
     "scorecard": {"version": ...},
     "checks": [{"name": ..., "score": -1..10, "reason": ...}, ...]}

A check with score -1 is not applicable and excluded from alignment.
"""

from __future__ import annotations

import json
import re
import shutil
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from supplyscope.model import AssessmentReport, RowRef, dumps, slugify
from supplyscope.rubric import round1
from supplyscope.synthesis.providers import SynthesisProvider


class BenchmarkError(ValueError):
    pass


class ScorecardError(BenchmarkError):
    """Malformed Scorecard result document."""


class ScorecardUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class ScorecardCheck:
    name: str
    score: int
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.score >= 0


@dataclass(frozen=True)
class ScorecardResult:
    repo: str
    checks: tuple[ScorecardCheck, ...]
    version: str = ""
    date: str = ""

    @property
    def applicable(self) -> tuple[ScorecardCheck, ...]:
        return tuple(c for c in self.checks if c.applicable)


def ingest_scorecard(raw: dict[str, Any] | str | bytes) -> ScorecardResult:
    """Parse a Scorecard JSON result; errors name the offending field."""
    if isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except ValueError as exc:
            raise ScorecardError(f"document is not JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScorecardError("document: expected a JSON object")
    if "checks" not in raw:
        raise ScorecardError("checks: field missing")
    if not isinstance(raw["checks"], list):
        raise ScorecardError("checks: expected a list")
    checks = []
    seen = set()
    for i, c in enumerate(raw["checks"]):
        where = f"checks[{i}]"
        if not isinstance(c, dict):
            raise ScorecardError(f"{where}: expected an object")
        name = c.get("name")
        if not isinstance(name, str) or not name:
            raise ScorecardError(f"{where}.name: missing or not a string")
        if name in seen:
            raise ScorecardError(f"{where}.name: duplicate check {name!r}")
        seen.add(name)
        score = c.get("score")
        if isinstance(score, bool) or not isinstance(score, int) or not -1 <= score <= 10:
            raise ScorecardError(f"{where}.score: expected integer in -1..10, got {score!r}")
        reason = c.get("reason", "")
        if not isinstance(reason, str):
            raise ScorecardError(f"{where}.reason: expected a string")
        checks.append(ScorecardCheck(name, score, reason))
    repo = raw.get("repo") or {}
    name = repo.get("name", "") if isinstance(repo, dict) else str(repo)
    if name and not name.startswith(("http://", "https://")):
        name = f"https://{name}"
    sc = raw.get("scorecard") or {}
    return ScorecardResult(
        repo=name,
        checks=tuple(checks),
        version=str(sc.get("version", "")) if isinstance(sc, dict) else "",
        date=str(raw.get("date", "")),
    )


def load_scorecard(path: str | Path) -> ScorecardResult:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise ScorecardError(f"cannot read {path}: {exc}") from exc
    return ingest_scorecard(text)


def run_scorecard(repo_url: str, executable: str = "scorecard", timeout: float = 600) -> ScorecardResult:
    """Invoke a locally installed Scorecard binary (needs GITHUB_AUTH_TOKEN)."""
    exe = shutil.which(executable)
    if exe is None:
        raise ScorecardUnavailable(
            f"'{executable}' not found on PATH; install it from https://github.com/ossf/scorecard "
            "or pass --scorecard with a saved JSON result"
        )
    proc = subprocess.run(
        [exe, f"--repo={repo_url}", "--format=json"],
        capture_output=True, text=True, timeout=timeout,
    )
    if proc.returncode != 0:
        raise ScorecardUnavailable(f"scorecard exited {proc.returncode}: {proc.stderr.strip()[:500]}")
    return ingest_scorecard(proc.stdout)


@dataclass(frozen=True)
class KeywordMap:
    version: str
    checks: dict[str, tuple[str, ...]]

    @classmethod
    def load(cls, path: str | Path | None = None) -> "KeywordMap":
        if path is None:
            text = resources.files("supplyscope").joinpath("data/scorecard_keywords.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        raw = json.loads(text)
        return cls(str(raw["version"]), {k: tuple(v) for k, v in raw["checks"].items()})

    def pattern(self, check: str) -> re.Pattern[str] | None:
        words = self.checks.get(check)
        if not words:
            return None
        return re.compile("|".join(r"(?<![a-z0-9])" + re.escape(w.lower()) for w in words))


DEFAULT_KEYWORDS = KeywordMap.load()


@dataclass(frozen=True)
class MatchMatrix:
    """Applicable checks mapped to the report rows addressing them, and back."""

    checks: dict[str, tuple[RowRef, ...]]
    rows: dict[RowRef, tuple[str, ...]]

    @property
    def matched(self) -> int:
        return sum(1 for refs in self.checks.values() if refs)

    @property
    def applicable(self) -> int:
        return len(self.checks)

    def matched_rows(self) -> set[RowRef]:
        return {r for r, names in self.rows.items() if names}


def _row_text(report: AssessmentReport, ref: RowRef) -> str:
    row = report.row(ref)
    return f"{row.factor} {row.observed}".lower()


def _build(report: AssessmentReport, pairs: dict[str, set[RowRef]]) -> MatchMatrix:
    rows: dict[RowRef, list[str]] = {ref: [] for ref, _ in report.iter_rows()}
    for name in sorted(pairs):
        for ref in pairs[name]:
            rows[ref].append(name)
    return MatchMatrix(
        checks={name: tuple(sorted(pairs[name], key=RowRef.sort_key)) for name in pairs},
        rows={ref: tuple(sorted(names)) for ref, names in rows.items()},
    )


def _assisted_prompt(report: AssessmentReport, scorecard: ScorecardResult) -> str:
    lines = [
        "Task: match",
        f"Library: {report.library.name}",
        "",
        "For each Scorecard check below, list the report rows that address the same concern,",
        "one per line as '<Check-Name> -> <Domain>#<row>'.",
        "",
        "Checks:",
    ]
    lines += [f"- {c.name}: {c.reason}" for c in scorecard.applicable]
    lines += ["", "Rows:"]
    lines += [f"- {ref}: {row.factor}: {row.observed}" for ref, row in report.iter_rows()]
    return "\n".join(lines) + "\n"


def match_findings(
    report: AssessmentReport,
    scorecard: ScorecardResult,
    provider: SynthesisProvider | None = None,
    keywords: KeywordMap = DEFAULT_KEYWORDS,
) -> MatchMatrix:
    """Keyword pass over applicable checks, optionally extended by a provider.

    A row matches a check when its factor or observed text hits any of the
    check's keywords. Provider suggestions can only add pairs.
    """
    refs = [ref for ref, _ in report.iter_rows()]
    texts = {ref: _row_text(report, ref) for ref in refs}
    pairs: dict[str, set[RowRef]] = {}
    for check in scorecard.applicable:
        pat = keywords.pattern(check.name)
        pairs[check.name] = {r for r in refs if pat is not None and pat.search(texts[r])}
    if provider is not None and refs:
        answer = provider.synthesize(_assisted_prompt(report, scorecard))
        valid_refs = set(refs)
        for line in answer.splitlines():
            name, sep, target = line.strip().lstrip("-").partition("->")
            name = name.strip()
            if not sep or name not in pairs:
                continue
            try:
                ref = RowRef.parse(target.strip())
            except ValueError:
                continue
            if ref in valid_refs:
                pairs[name].add(ref)
    return _build(report, pairs)


def compute_alignment(matrix: MatchMatrix | int, applicable: int | None = None) -> float:
    """``round1(100 * matched / applicable)`` with half-up rounding."""
    matched = matrix.matched if isinstance(matrix, MatchMatrix) else int(matrix)
    if applicable is None:
        if not isinstance(matrix, MatchMatrix):
            raise BenchmarkError("applicable count required")
        applicable = matrix.applicable
    if applicable < 1:
        raise BenchmarkError("no applicable checks")
    if not 0 <= matched <= applicable:
        raise BenchmarkError(f"matched {matched} outside 0..{applicable}")
    return round1(Fraction(100 * matched, applicable))


def normalize_factor(text: str) -> str:
    return " ".join(re.sub(r"[^a-z0-9]+", " ", text.lower()).split())


def compute_novelty(report: AssessmentReport, matrix: MatchMatrix) -> list[RowRef]:
    """Agent-only findings: unmatched rows rated <= 3 that carry evidence or a
    missing-info flag, one per normalized factor name."""
    matched = matrix.matched_rows()
    seen: set[str] = set()
    out = []
    for ref, row in report.iter_rows():
        if ref in matched or row.rating > 3:
            continue
        if not (row.citations or row.missing_info):
            continue
        key = normalize_factor(row.factor)
        if key in seen:
            continue
        seen.add(key)
        out.append(ref)
    return out


@dataclass(frozen=True)
class BenchmarkResult:
    library: str
    scorecard_repo: str
    scorecard_version: str
    matched: int
    applicable: int
    alignment_pct: float
    novelty_findings: tuple[RowRef, ...]
    matches: dict[str, tuple[RowRef, ...]] = field(default_factory=dict)

    @property
    def novelty_yield(self) -> int:
        return len(self.novelty_findings)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "library": self.library,
            "scorecard_repo": self.scorecard_repo,
            "scorecard_version": self.scorecard_version,
            "matched": self.matched,
            "applicable": self.applicable,
            "alignment_pct": self.alignment_pct,
            "novelty_yield": self.novelty_yield,
            "novelty_findings": [str(r) for r in self.novelty_findings],
            "matches": {k: [str(r) for r in v] for k, v in sorted(self.matches.items())},
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BenchmarkResult":
        return cls(
            library=d["library"],
            scorecard_repo=d.get("scorecard_repo", ""),
            scorecard_version=d.get("scorecard_version", ""),
            matched=int(d["matched"]),
            applicable=int(d["applicable"]),
            alignment_pct=float(d["alignment_pct"]),
            novelty_findings=tuple(RowRef.parse(r) for r in d["novelty_findings"]),
            matches={k: tuple(RowRef.parse(r) for r in v) for k, v in d.get("matches", {}).items()},
        )


def benchmark(
    report: AssessmentReport,
    scorecard: ScorecardResult,
    provider: SynthesisProvider | None = None,
    keywords: KeywordMap = DEFAULT_KEYWORDS,
) -> BenchmarkResult:
    matrix = match_findings(report, scorecard, provider, keywords)
    return BenchmarkResult(
        library=report.library.name,
        scorecard_repo=scorecard.repo,
        scorecard_version=scorecard.version,
        matched=matrix.matched,
        applicable=matrix.applicable,
        alignment_pct=compute_alignment(matrix, matrix.applicable) if matrix.applicable else 0.0,
        novelty_findings=tuple(compute_novelty(report, matrix)),
        matches=dict(matrix.checks),
    )


def benchmark_path(report: AssessmentReport, out_dir: str | Path) -> Path:
    lib = report.library
    return Path(out_dir) / f"{slugify(lib.name)}-{lib.assessed_at:%Y-%m-%d}-benchmark.json"


def write_benchmark(result: BenchmarkResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(result), encoding="utf-8")
    return path
