"""Command line entry point.

Exit codes: 0 success, 1 usage/config/input error, 2 output produced but at
least one section degraded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from supplyscope import benchmark as bench
from supplyscope import leaderboard as lb
from supplyscope.config import ConfigError, PipelineConfig, build_provider, build_sources
from supplyscope.model import Category, Library, ModelError, parse_ts
from supplyscope.orchestrator import OK, run_assessment
from supplyscope.report import load_report, redact, render_report, write_report

EXIT_OK, EXIT_ERROR, EXIT_DEGRADED = 0, 1, 2
STORE_ENV = "SUPPLYSCOPE_STORE"


class CliError(Exception):
    pass


class _Formatter(argparse.HelpFormatter):
    # fixed width so help output does not depend on the terminal
    def __init__(self, prog: str) -> None:
        super().__init__(prog, width=100, max_help_position=32)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs) -> None:
        kwargs.setdefault("formatter_class", _Formatter)
        super().__init__(*args, **kwargs)

    def error(self, message: str):  # argparse would exit 2, which means "degraded" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--cache-dir", type=Path, help="evidence cache directory")
    p.add_argument("--offline", action="store_true", help="forbid network sources (fixtures and cache only)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="pipeline config JSON")
    p.add_argument("--provider", choices=("mock", "http"), help="synthesis provider (default: mock)")
    p.add_argument("--fixtures", type=Path, help="mock provider fixture directory")
    p.add_argument("--endpoint", help="http provider endpoint URL")
    p.add_argument("--evidence", type=Path, action="append", default=[],
                   help="directory of fixture source JSON files (repeatable)")
    p.add_argument("--max-depth", type=int, help="quality loop depth (default 3)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="supplyscope", description="Library supply-chain risk assessment pipeline.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    a = sub.add_parser("assess", parents=[common], help="assess one library and write its report")
    a.add_argument("--name", required=True)
    a.add_argument("--repo-url", required=True)
    a.add_argument("--category", default="other", choices=[c.value for c in Category])
    a.add_argument("--version", dest="lib_version")
    a.add_argument("--assessed-at", help="RFC 3339 timestamp (default: now)")
    a.add_argument("--out", type=Path, default=Path("."), help="output directory")
    a.add_argument("--redact", choices=("public", "disclosure-hold"), default="public")
    a.add_argument("--trace", type=Path, help="write the run trace JSON here")
    _pipeline_args(a)

    b = sub.add_parser("benchmark", parents=[common], help="compare a report with Scorecard output")
    b.add_argument("--report", type=Path, required=True)
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--scorecard", type=Path, help="saved Scorecard JSON result")
    src.add_argument("--run-scorecard", action="store_true", help="invoke a local scorecard executable")
    b.add_argument("--keyword-map", type=Path, help="check keyword map JSON")
    b.add_argument("--out", type=Path, help="output directory (default: next to the report)")

    l = sub.add_parser("leaderboard", help="manage the leaderboard store")
    lsub = l.add_subparsers(dest="action", metavar="ACTION")
    lsub.required = True
    store_help = f"store file (default: ${STORE_ENV})"
    add = lsub.add_parser("add", parents=[common], help="append a snapshot")
    add.add_argument("--store", type=Path, help=store_help)
    add.add_argument("--report", type=Path, action="append", required=True)
    add.add_argument("--benchmark", type=Path, action="append", default=[])
    add.add_argument("--created-at", help="RFC 3339 timestamp (default: now)")
    ren = lsub.add_parser("render", parents=[common], help="write the static site for a snapshot")
    ren.add_argument("--store", type=Path, help=store_help)
    ren.add_argument("--out", type=Path, required=True)
    ren.add_argument("--snapshot", type=int, help="snapshot id (default: latest)")
    dif = lsub.add_parser("diff", parents=[common], help="score deltas between two snapshots")
    dif.add_argument("--store", type=Path, help=store_help)
    dif.add_argument("a", type=int)
    dif.add_argument("b", type=int)

    r = sub.add_parser("replay", parents=[common], help="re-run an assessment and compare to a saved report")
    r.add_argument("--report", type=Path, required=True)
    _pipeline_args(r)
    return parser


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    provider = dict(cfg.provider)
    if args.provider and args.provider != provider.get("kind"):
        provider = {"kind": args.provider}
    if args.fixtures is not None:
        provider["fixtures"] = args.fixtures
    if args.endpoint:
        provider["endpoint"] = args.endpoint
    sources = list(cfg.sources) + [{"kind": "fixture", "dir": d} for d in args.evidence]
    return replace(
        cfg,
        provider=provider,
        sources=tuple(sources),
        max_loop_depth=args.max_depth or cfg.max_loop_depth,
        cache_dir=args.cache_dir or cfg.cache_dir,
        offline=args.offline,
    )


def _assess(library: Library, cfg: PipelineConfig):
    for spec in cfg.sources:
        if spec.get("kind") == "fixture" and not Path(spec["dir"]).is_dir():
            raise CliError(f"evidence directory not found: {spec['dir']}")
    sources = build_sources(cfg, library)
    provider = build_provider(cfg)
    return run_assessment(library, sources, provider, cfg)


def cmd_assess(args) -> int:
    try:
        assessed = parse_ts(args.assessed_at) if args.assessed_at else None
        kwargs = {"assessed_at": assessed} if assessed else {}
        library = Library(args.name, args.repo_url, Category(args.category), version=args.lib_version, **kwargs)
    except ModelError as exc:
        raise CliError(str(exc)) from exc
    cfg = _config(args)
    report, trace = _assess(library, cfg)
    report = redact(report, args.redact)
    paths = write_report(report, args.out)
    if args.trace:
        args.trace.parent.mkdir(parents=True, exist_ok=True)
        args.trace.write_text(json.dumps(trace.to_dict(), indent=2) + "\n", encoding="utf-8")
    for path in paths.values():
        print(f"wrote {path}")
    print(f"trust: {report.trust_sum}/25 (" + ", ".join(
        f"{s.domain.short}={s.score}" for s in report.sections) + ")")
    if trace.status != OK:
        degraded = [d.value for d, t in trace.sections.items() if t.status != OK]
        print(f"degraded sections: {', '.join(degraded)}", file=sys.stderr)
        return EXIT_DEGRADED
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        report = load_report(args.report)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot load report {args.report}: {exc}") from exc
    if args.run_scorecard:
        if args.offline:
            raise CliError("--run-scorecard needs network access; drop --offline or pass --scorecard")
        try:
            scorecard = bench.run_scorecard(report.library.repo_url)
        except bench.ScorecardUnavailable as exc:
            raise CliError(str(exc)) from exc
    else:
        try:
            scorecard = bench.load_scorecard(args.scorecard)
        except bench.ScorecardError as exc:
            raise CliError(f"malformed scorecard {args.scorecard}: {exc}") from exc
    keywords = bench.KeywordMap.load(args.keyword_map) if args.keyword_map else bench.DEFAULT_KEYWORDS
    result = bench.benchmark(report, scorecard, keywords=keywords)
    out = bench.benchmark_path(report, args.out or args.report.parent)
    bench.write_benchmark(result, out)
    print(f"wrote {out}")
    print(f"matched: {result.matched}/{result.applicable}")
    print(f"alignment: {result.alignment_pct:.1f}")
    print(f"novelty yield: {result.novelty_yield}")
    return EXIT_OK


def _store(args) -> lb.LeaderboardStore:
    path = args.store or (Path(os.environ[STORE_ENV]) if os.environ.get(STORE_ENV) else None)
    if path is None:
        raise CliError(f"no store given; pass --store or set {STORE_ENV}")
    return lb.LeaderboardStore(path)


def cmd_leaderboard(args) -> int:
    store = _store(args)
    if args.action == "add":
        benches = {}
        for p in args.benchmark:
            b = bench.BenchmarkResult.from_dict(json.loads(p.read_text("utf-8")))
            benches[b.library] = b
        entries = []
        base = store.path.resolve().parent
        for p in args.report:
            report = load_report(p)
            rel = os.path.relpath(p.resolve(), base)
            entries.append(lb.entry_from_report(report, rel, benches.get(report.library.name)))
        created = parse_ts(args.created_at) if args.created_at else None
        sid = lb.append_snapshot(store, entries, created)
        print(f"snapshot {sid}: {len(entries)} entries")
        return EXIT_OK
    if args.action == "render":
        snap = store.get(args.snapshot) if args.snapshot else store.latest()
        if snap is None:
            raise CliError("no snapshots in store")
        base = store.path.resolve().parent
        out = args.out.resolve()
        relinked = tuple(
            replace(e, report_path=os.path.relpath(base / e.report_path, out)) if e.report_path else e
            for e in snap.entries
        )
        for path in lb.emit_static_site(replace(snap, entries=relinked), args.out):
            print(f"wrote {path}")
        return EXIT_OK
    diff = lb.diff_snapshots(store, args.a, args.b)
    print(json.dumps(diff.to_dict(), indent=2))
    return EXIT_OK


def cmd_replay(args) -> int:
    saved_bytes = args.report.read_bytes()
    saved = load_report(args.report)
    cfg = _config(args)
    cfg = replace(cfg, offline=True)
    report, trace = _assess(saved.library, cfg)
    fresh = render_report(report, "json")
    if fresh == saved_bytes:
        print("replay identical")
        return EXIT_DEGRADED if trace.status != OK else EXIT_OK
    print("replay differs from saved report", file=sys.stderr)
    return EXIT_ERROR


COMMANDS = {
    "assess": cmd_assess,
    "benchmark": cmd_benchmark,
    "leaderboard": cmd_leaderboard,
    "replay": cmd_replay,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (CliError, ConfigError, lb.LeaderboardError, bench.BenchmarkError, ModelError) as exc:
        print(f"supplyscope: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"supplyscope: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
