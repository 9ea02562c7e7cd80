"""Append-only leaderboard store and static site emission.

The store is a JSON Lines file, one snapshot per line::

    {"schema": 1, "snapshot_id": 3, "created_at": "2025-05-01T00:00:00Z",
     "entries": [{"library": ..., "category": ..., "scores": {"Li": 5, ...},
                  "trust_sum": 13, "trust_mean": 2.6, "alignment_pct": 88.2,
                  "novelty_yield": 8, "report_path": "..."}]}

Existing lines are never rewritten. Writers hold ``<store>.lock``.
"""

from __future__ import annotations

import html
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from supplyscope.model import DOMAINS, AssessmentReport, format_ts, parse_ts

SCHEMA = 1


class LeaderboardError(ValueError):
    pass


@dataclass(frozen=True)
class LeaderboardEntry:
    library: str
    scores: tuple[int, ...]
    trust_sum: int
    trust_mean: float
    category: str = "other"
    alignment_pct: float | None = None
    novelty_yield: int | None = None
    report_path: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(self.scores))
        if len(self.scores) != len(DOMAINS):
            raise LeaderboardError(f"{self.library}: expected 5 domain scores")

    def to_dict(self) -> dict[str, Any]:
        return {
            "library": self.library,
            "category": self.category,
            "scores": {d.short: s for d, s in zip(DOMAINS, self.scores)},
            "trust_sum": self.trust_sum,
            "trust_mean": self.trust_mean,
            "alignment_pct": self.alignment_pct,
            "novelty_yield": self.novelty_yield,
            "report_path": self.report_path,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LeaderboardEntry":
        return cls(
            library=d["library"],
            category=d.get("category", "other"),
            scores=tuple(int(d["scores"][dom.short]) for dom in DOMAINS),
            trust_sum=int(d["trust_sum"]),
            trust_mean=float(d["trust_mean"]),
            alignment_pct=d.get("alignment_pct"),
            novelty_yield=d.get("novelty_yield"),
            report_path=d.get("report_path", ""),
        )


def entry_from_report(report: AssessmentReport, report_path: str = "", bench=None) -> LeaderboardEntry:
    return LeaderboardEntry(
        library=report.library.name,
        category=report.library.category.value,
        scores=report.scores,
        trust_sum=report.trust_sum,
        trust_mean=float(report.trust_mean),
        alignment_pct=bench.alignment_pct if bench is not None else None,
        novelty_yield=bench.novelty_yield if bench is not None else None,
        report_path=report_path,
    )


@dataclass(frozen=True)
class LeaderboardSnapshot:
    snapshot_id: int
    created_at: datetime
    entries: tuple[LeaderboardEntry, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "snapshot_id": self.snapshot_id,
            "created_at": format_ts(self.created_at),
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LeaderboardSnapshot":
        if d.get("schema") != SCHEMA:
            raise LeaderboardError(f"unsupported snapshot schema {d.get('schema')!r}")
        return cls(
            snapshot_id=int(d["snapshot_id"]),
            created_at=parse_ts(d["created_at"]),
            entries=tuple(LeaderboardEntry.from_dict(e) for e in d["entries"]),
        )

    def line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


class LeaderboardStore:
    def __init__(self, path: str | Path, lock_timeout: float = 10.0):
        self.path = Path(path)
        self.lock_path = self.path.with_name(self.path.name + ".lock")
        self.lock_timeout = lock_timeout

    def snapshots(self) -> list[LeaderboardSnapshot]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open(encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        out.append(LeaderboardSnapshot.from_dict(json.loads(line)))
                    except (ValueError, KeyError) as exc:
                        raise LeaderboardError(f"{self.path}:{n}: corrupt snapshot line: {exc}") from exc
        return out

    def get(self, snapshot_id: int) -> LeaderboardSnapshot:
        for s in self.snapshots():
            if s.snapshot_id == snapshot_id:
                return s
        raise LeaderboardError(f"unknown snapshot id {snapshot_id}")

    def latest(self) -> LeaderboardSnapshot | None:
        snaps = self.snapshots()
        return snaps[-1] if snaps else None

    def _acquire(self) -> int:
        deadline = time.monotonic() + self.lock_timeout
        while True:
            try:
                return os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise LeaderboardError(f"store is locked: {self.lock_path}") from None
                time.sleep(0.05)

    def append(self, entries: Sequence[LeaderboardEntry], created_at: datetime | None = None) -> int:
        names = [e.library for e in entries]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise LeaderboardError(f"duplicate library in entries: {', '.join(dupes)}")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd = self._acquire()
        try:
            latest = self.latest()
            snap = LeaderboardSnapshot(
                snapshot_id=(latest.snapshot_id if latest else 0) + 1,
                created_at=created_at or datetime.now(timezone.utc),
                entries=tuple(entries),
            )
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(snap.line() + "\n")
            return snap.snapshot_id
        finally:
            os.close(fd)
            os.unlink(self.lock_path)


def append_snapshot(
    store: LeaderboardStore, entries: Sequence[LeaderboardEntry], created_at: datetime | None = None
) -> int:
    return store.append(entries, created_at)


def rank(snapshot: LeaderboardSnapshot | Iterable[LeaderboardEntry]) -> list[LeaderboardEntry]:
    """Descending trust-sum, ties by ascending library name."""
    entries = snapshot.entries if isinstance(snapshot, LeaderboardSnapshot) else tuple(snapshot)
    return sorted(entries, key=lambda e: (-e.trust_sum, e.library))


@dataclass(frozen=True)
class SnapshotDiff:
    a: int
    b: int
    deltas: dict[str, dict[str, int]]
    added: tuple[str, ...]
    removed: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "from": self.a,
            "to": self.b,
            "deltas": self.deltas,
            "added": list(self.added),
            "removed": list(self.removed),
        }


def diff_snapshots(store: LeaderboardStore, a: int, b: int) -> SnapshotDiff:
    if not a < b:
        raise LeaderboardError(f"diff requires id-a < id-b (got {a}, {b})")
    old = {e.library: e for e in store.get(a).entries}
    new = {e.library: e for e in store.get(b).entries}
    deltas = {}
    for name in sorted(old.keys() & new.keys()):
        d = {dom.short: new[name].scores[i] - old[name].scores[i] for i, dom in enumerate(DOMAINS)}
        d["Trust"] = new[name].trust_sum - old[name].trust_sum
        deltas[name] = d
    return SnapshotDiff(
        a=a,
        b=b,
        deltas=deltas,
        added=tuple(sorted(new.keys() - old.keys())),
        removed=tuple(sorted(old.keys() - new.keys())),
    )


_CSS = """body{font-family:system-ui,sans-serif;margin:2rem;color:#1b1b1b}
table{border-collapse:collapse}th,td{border:1px solid #ccc;padding:.3rem .6rem;text-align:center}
th{background:#f0f0f0}td.lib{text-align:left}
.s1{background:#f8d0d0}.s2{background:#fbe3c8}.s3{background:#fdf5c4}.s4{background:#e0f2cf}.s5{background:#c9ecc0}"""


def _fmt(value: Any) -> str:
    return "n/a" if value is None else html.escape(str(value))


def render_html(snapshot: LeaderboardSnapshot) -> str:
    head = ["Rank", "Library", "Category"] + [d.short for d in DOMAINS] + [
        "Trust (5-25)", "Mean", "Alignment %", "Novelty", "Report"]
    rows = []
    for n, e in enumerate(rank(snapshot), 1):
        cells = [f"<td>{n}</td>", f'<td class="lib">{html.escape(e.library)}</td>',
                 f"<td>{html.escape(e.category)}</td>"]
        cells += [f'<td class="s{s}">{s}</td>' for s in e.scores]
        cells += [
            f"<td><b>{e.trust_sum}</b></td>",
            f"<td>{e.trust_mean:.1f}</td>",
            f"<td>{_fmt(e.alignment_pct)}</td>",
            f"<td>{_fmt(e.novelty_yield)}</td>",
            f'<td><a href="{html.escape(e.report_path, quote=True)}">report</a></td>'
            if e.report_path else "<td>n/a</td>",
        ]
        rows.append("<tr>" + "".join(cells) + "</tr>")
    return "\n".join([
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>Library risk leaderboard: snapshot {snapshot.snapshot_id}</title>",
        f"<style>{_CSS}</style>",
        "</head>",
        "<body>",
        "<h1>Library risk leaderboard</h1>",
        f"<p>Snapshot {snapshot.snapshot_id}, created {format_ts(snapshot.created_at)}. "
        "Domain scores are 1 (high risk) to 5 (low risk); libraries are ranked by trust sum.</p>",
        '<table id="leaderboard">',
        "<thead><tr>" + "".join(f"<th>{html.escape(h)}</th>" for h in head) + "</tr></thead>",
        "<tbody>",
        *rows,
        "</tbody>",
        "</table>",
        "</body>",
        "</html>",
        "",
    ])


def emit_static_site(snapshot: LeaderboardSnapshot, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        data = out / f"snapshot-{snapshot.snapshot_id}.json"
        data.write_text(json.dumps(snapshot.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        page = out / "index.html"
        page.write_text(render_html(snapshot), encoding="utf-8")
    except OSError as exc:
        raise LeaderboardError(f"cannot write site to {out}: {exc}") from exc
    return [data, page]
