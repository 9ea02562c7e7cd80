"""Section synthesis: prompts, table grammar, quality gate and providers."""

from supplyscope.synthesis.concepts import KEY_CONCEPTS, concepts_hit
from supplyscope.synthesis.prompts import build_plan_prompt, build_prompt
from supplyscope.synthesis.providers import (
    HttpProvider,
    MockProvider,
    ProviderError,
    SynthesisProvider,
    missing_info_rows,
)
from supplyscope.synthesis.quality import COVERAGE_GAP, QualityVerdict, quality_check
from supplyscope.synthesis.table import SectionDraft, UnparseableSection, parse_section, render_rows


def mock_synthesize(prompt: str, fixtures) -> str:
    """Functional form of :class:`MockProvider` for one-off calls."""
    return MockProvider(fixtures).synthesize(prompt)


__all__ = [
    "COVERAGE_GAP",
    "HttpProvider",
    "KEY_CONCEPTS",
    "MockProvider",
    "ProviderError",
    "QualityVerdict",
    "SectionDraft",
    "SynthesisProvider",
    "UnparseableSection",
    "build_plan_prompt",
    "build_prompt",
    "concepts_hit",
    "missing_info_rows",
    "mock_synthesize",
    "parse_section",
    "quality_check",
    "render_rows",
]
