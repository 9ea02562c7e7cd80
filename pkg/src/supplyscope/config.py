"""Pipeline configuration file and source/provider construction.

Config is a JSON object; every key is optional::

    {
      "max_loop_depth": 3,
      "provider": {"kind": "mock", "fixtures": "fixtures/synthesis"},
      "sources": [
        {"kind": "fixture", "dir": "fixtures/evidence"},
        {"kind": "github"},
        {"kind": "osv", "package": "torch", "ecosystem": "PyPI"},
        {"kind": "web-search", "endpoint": "https://search.example/api", "params": {"cx": "..."}}
      ],
      "cache_dir": ".supplyscope-cache",
      "cache_ttl_days": 7,
      "rate_limits": {"github": 1.0, "osv": 1.0, "web-search": 1.0},
      "provider_retries": 2,
      "plan_suggestions": true
    }

Relative paths resolve against the config file's directory. An ``http``
provider takes ``{"kind": "http", "endpoint": URL, "auth_env": NAME}``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from supplyscope.evidence import (
    CachedSource,
    EvidenceSource,
    FixtureSource,
    GitHubSource,
    OsvSource,
    RateLimitedSource,
    ResponseCache,
    TokenBucket,
    WebSearchSource,
)
from supplyscope.model import Library
from supplyscope.synthesis import HttpProvider, MockProvider, SynthesisProvider

logger = logging.getLogger(__name__)

_KEYS = {
    "max_loop_depth", "provider", "sources", "cache_dir", "cache_ttl_days",
    "rate_limits", "provider_retries", "plan_suggestions",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    max_loop_depth: int = 3
    provider: dict[str, Any] = field(default_factory=lambda: {"kind": "mock", "fixtures": None})
    sources: tuple[dict[str, Any], ...] = ()
    cache_dir: Path | None = None
    cache_ttl_days: float = 7.0
    rate_limits: dict[str, float] = field(default_factory=dict)
    provider_retries: int = 2
    plan_suggestions: bool = True
    offline: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.max_loop_depth, int) or self.max_loop_depth < 1:
            raise ConfigError("max_loop_depth must be an integer >= 1")
        if self.provider.get("kind") not in ("mock", "http"):
            raise ConfigError(f"unknown provider kind: {self.provider.get('kind')!r}")
        if self.provider["kind"] == "http" and not self.provider.get("endpoint"):
            raise ConfigError("http provider requires an endpoint")
        if self.provider_retries < 0:
            raise ConfigError("provider_retries must be >= 0")

    @classmethod
    def from_dict(cls, raw: dict[str, Any], base: Path | None = None) -> "PipelineConfig":
        unknown = set(raw) - _KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        base = base or Path.cwd()

        def resolve(p: str | None) -> Path | None:
            return None if p is None else (base / p)

        provider = dict(raw.get("provider", {"kind": "mock"}))
        if provider.get("fixtures") is not None:
            provider["fixtures"] = resolve(provider["fixtures"])
        sources = []
        for s in raw.get("sources", ()):
            s = dict(s)
            if "dir" in s:
                s["dir"] = resolve(s["dir"])
            sources.append(s)
        return cls(
            max_loop_depth=raw.get("max_loop_depth", 3),
            provider=provider,
            sources=tuple(sources),
            cache_dir=resolve(raw.get("cache_dir")),
            cache_ttl_days=float(raw.get("cache_ttl_days", 7.0)),
            rate_limits={k: float(v) for k, v in raw.get("rate_limits", {}).items()},
            provider_retries=int(raw.get("provider_retries", 2)),
            plan_suggestions=bool(raw.get("plan_suggestions", True)),
        )

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(raw, path.parent)

    def with_overrides(self, **changes: Any) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def build_sources(config: PipelineConfig, library: Library) -> list[EvidenceSource]:
    """Instantiate configured sources, wrapped with rate limiting and caching.

    In offline mode network sources are only kept when a cache directory is
    configured, and then answer from the cache alone.
    """
    cache = (
        ResponseCache(config.cache_dir, ttl=config.cache_ttl_days * 86400)
        if config.cache_dir is not None
        else None
    )
    out: list[EvidenceSource] = []
    for spec in config.sources:
        kind = spec.get("kind")
        if kind == "fixture":
            if spec.get("dir") is None:
                raise ConfigError("fixture source requires 'dir'")
            built: list[EvidenceSource] = list(FixtureSource.from_directory(spec["dir"]))
        elif kind == "github":
            built = [GitHubSource(library.repo_url)]
        elif kind == "osv":
            built = [OsvSource(spec.get("package", library.name), spec.get("ecosystem", "PyPI"))]
        elif kind == "web-search":
            if not spec.get("endpoint"):
                raise ConfigError("web-search source requires 'endpoint'")
            built = [WebSearchSource(spec["endpoint"], extra_params=spec.get("params"))]
        else:
            raise ConfigError(f"unknown source kind: {kind!r}")
        for src in built:
            if not src.local:
                rate = config.rate_limits.get(src.name, 1.0)
                src = RateLimitedSource(src, TokenBucket(rate=rate))
                if config.offline and cache is None:
                    logger.info("offline: dropping network source %s", src.name)
                    continue
            if cache is not None:
                src = CachedSource(src, cache, offline=config.offline)
            out.append(src)
    return out


def build_provider(config: PipelineConfig) -> SynthesisProvider:
    spec = config.provider
    if spec["kind"] == "mock":
        return MockProvider(spec.get("fixtures"))
    if config.offline:
        raise ConfigError("offline mode forbids the http provider")
    return HttpProvider(spec["endpoint"], auth_env=spec.get("auth_env", "SUPPLYSCOPE_PROVIDER_TOKEN"))
