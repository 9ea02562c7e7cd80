"""Synthesis providers: a deterministic fixture-backed mock and an HTTP client."""

from __future__ import annotations

import logging
import os
from abc import ABC, abstractmethod
from pathlib import Path

import httpx

from supplyscope.model import RiskDomain, RiskFactorRow, slugify
from supplyscope.synthesis.concepts import KEY_CONCEPTS
from supplyscope.synthesis.prompts import parse_prompt_header
from supplyscope.synthesis.table import render_rows

logger = logging.getLogger(__name__)


class ProviderError(RuntimeError):
    pass


class SynthesisProvider(ABC):
    """Anything that maps a prompt to raw text."""

    #: orchestrator serializes calls when False
    concurrent_safe: bool = True

    @abstractmethod
    def synthesize(self, prompt: str) -> str:
        ...


def missing_info_rows(domain: RiskDomain, count: int = 3) -> list[RiskFactorRow]:
    """``count`` missing-info rows whose factors together name every key concept."""
    concepts = list(KEY_CONCEPTS[RiskDomain(domain)])
    count = max(1, min(count, len(concepts)))
    groups = [[c] for c in concepts[: count - 1]] + [concepts[count - 1:]]
    return [
        RiskFactorRow(
            factor="; ".join(g),
            observed="not found",
            rating=1,
            justification="No retrievable evidence for this factor",
            control=f"Obtain verifiable evidence on {' and '.join(g)}",
            citations=(),
            missing_info=True,
        )
        for g in groups
    ]


class MockProvider(SynthesisProvider):
    """Replays section tables from a fixture directory.

    Layout, keyed by library slug and lowercase domain name::

        <root>/<library>/<domain>.md       table returned for every iteration
        <root>/<library>/<domain>.<n>.md   override for iteration n
        <root>/<library>/plan.<domain>.md  extra planning queries ("- query" lines)
        <root>/<library>/match.md          benchmark-assisted match lines

    A section prompt with no fixture gets a table of three missing-info rows.
    """

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root is not None else None
        self.calls = 0

    def _read(self, library: str, name: str) -> str | None:
        if self.root is None:
            return None
        path = self.root / slugify(library) / name
        return path.read_text("utf-8") if path.is_file() else None

    def synthesize(self, prompt: str) -> str:
        self.calls += 1
        head = parse_prompt_header(prompt)
        task = head.get("task", "section")
        library = head.get("library", "")
        if task == "match":
            return self._read(library, "match.md") or ""
        domain = RiskDomain.parse(head.get("domain", ""))
        key = domain.value.lower()
        if task == "plan":
            return self._read(library, f"plan.{key}.md") or ""
        iteration = head.get("iteration", "1")
        text = self._read(library, f"{key}.{iteration}.md") or self._read(library, f"{key}.md")
        if text is not None:
            return text
        return (
            f"No fixture available for {library} / {domain.value}.\n\n"
            + render_rows(missing_info_rows(domain))
        )


class HttpProvider(SynthesisProvider):
    """POSTs ``{"prompt": ...}`` and reads ``{"completion": ...}``.

    A bearer token is taken from the environment variable named by
    ``auth_env`` when it is set.
    """

    def __init__(
        self,
        endpoint: str,
        auth_env: str = "SUPPLYSCOPE_PROVIDER_TOKEN",
        client: httpx.Client | None = None,
        timeout: float = 120.0,
    ):
        self.endpoint = endpoint
        self.client = client or httpx.Client(timeout=timeout)
        token = os.environ.get(auth_env)
        if token:
            self.client.headers["Authorization"] = f"Bearer {token}"

    def synthesize(self, prompt: str) -> str:
        try:
            resp = self.client.post(self.endpoint, json={"prompt": prompt})
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        if resp.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {resp.status_code}")
        try:
            completion = resp.json()["completion"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderError("provider response lacks a 'completion' field") from exc
        if not isinstance(completion, str):
            raise ProviderError("provider 'completion' is not a string")
        return completion
