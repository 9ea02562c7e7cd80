from __future__ import annotations

import shutil
from datetime import datetime, timezone
from pathlib import Path

import pytest

from supplyscope.config import PipelineConfig, build_provider, build_sources
from supplyscope.evidence import EvidenceLedger
from supplyscope.model import DOMAINS, Category, DomainAssessment, EvidenceItem, Library, RiskFactorRow
from supplyscope.orchestrator import run_assessment
from supplyscope.report import compile_report
from supplyscope.rubric import score_ratings

FIXTURES = Path(__file__).parent / "fixtures"
DEMO = FIXTURES / "demo"
SCORECARDS = FIXTURES / "scorecards"
WHEN = datetime(2025, 5, 1, tzinfo=timezone.utc)

# ratings per target domain score
RATINGS_FOR = {1: (1, 1, 1), 2: (1, 3, 3), 3: (3, 3, 3), 4: (3, 5, 5), 5: (5, 5, 5)}


def demo_library(**kw) -> Library:
    args = dict(name="examplelib", repo_url="https://github.com/example-org/examplelib",
                category=Category.OTHER, assessed_at=WHEN)
    args.update(kw)
    return Library(**args)


def run_demo(cache_dir=None, **overrides):
    cfg = PipelineConfig.load(DEMO / "config.json")
    if cache_dir is not None:
        overrides["cache_dir"] = Path(cache_dir)
    cfg = cfg.with_overrides(**overrides)
    lib = demo_library()
    return run_assessment(lib, build_sources(cfg, lib), build_provider(cfg), cfg)


def make_report(scores=(5, 1, 3, 1, 3), name="lib", category=Category.OTHER, factors=None):
    """Valid report whose sections score exactly *scores*."""
    ev = EvidenceItem.create("https://example.org/e", f"evidence for {name}", "official-docs", "q", WHEN)
    sections = []
    for d, s in zip(DOMAINS, scores):
        rows = [
            RiskFactorRow(
                factor=(factors or {}).get((d, i), f"{d.value} factor {i}"),
                observed=f"{i + 1} observations",
                rating=r,
                justification="see evidence",
                control=f"{d.value} control {i}" if r < 5 else "None required",
                citations=(ev.id,),
            )
            for i, r in enumerate(RATINGS_FOR[s])
        ]
        assert score_ratings(r.rating for r in rows) == s
        sections.append(DomainAssessment(d, tuple(rows), s))
    lib = Library(name, f"https://github.com/org/{name.lower().replace(' ', '-')}", category, WHEN)
    return compile_report(lib, sections, EvidenceLedger([ev]))


@pytest.fixture
def demo_dir(tmp_path) -> Path:
    """Writable copy of the demo corpus."""
    dst = tmp_path / "demo"
    shutil.copytree(DEMO, dst)
    return dst


@pytest.fixture(scope="session")
def demo_run():
    return run_demo()
