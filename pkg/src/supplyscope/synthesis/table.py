"""Plain-text factor table grammar.

A section is free text plus one pipe table::

    | Factor | Observed | Rating | Justification | Control |
    |---|---|---|---|---|
    | SBOM | No SBOM in 12 releases | 1 | Release assets list no SPDX file [ev-1a2b] | Publish an SBOM |
    | Patent grant | not found | 1 (missing info) | Terms could not be located [] | Ask maintainers |

The Justification cell ends with a bracketed, comma-separated citation list
(possibly empty). ``|`` and ``\\`` inside cells are backslash-escaped.
Missing-information rows carry ``(missing info)`` after the rating.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from supplyscope.model import RiskDomain, RiskFactorRow
from supplyscope.evidence.ledger import EvidenceLedger

HEADER = ("Factor", "Observed", "Rating", "Justification", "Control")
MISSING_TAG = "(missing info)"

_RATING = re.compile(r"^([+-]?\d+)\s*(\(missing info\))?$", re.IGNORECASE)
_CITES = re.compile(r"\[([^\[\]]*)\]\s*$")
_SEPARATOR = re.compile(r"^:?-{1,}:?$")


class UnparseableSection(ValueError):
    def __init__(self, message: str, errors: list[str] | None = None):
        super().__init__(message)
        self.errors = list(errors or [])


@dataclass(frozen=True)
class SectionDraft:
    domain: RiskDomain
    raw_text: str
    rows: tuple[RiskFactorRow, ...]
    errors: tuple[str, ...] = ()
    narrative: str = ""
    #: table data rows seen in raw_text, parsed or not
    table_rows: int = field(default=0)


def _escape(text: str) -> str:
    text = " ".join(str(text).split())
    return text.replace("\\", "\\\\").replace("|", "\\|")


def render_rows(rows: list[RiskFactorRow] | tuple[RiskFactorRow, ...]) -> str:
    """Emit rows in the table grammar; inverse of :func:`parse_section`."""
    lines = [
        "| " + " | ".join(HEADER) + " |",
        "|" + "---|" * len(HEADER),
    ]
    for r in rows:
        rating = f"{r.rating} {MISSING_TAG}" if r.missing_info else str(r.rating)
        cites = "[" + ", ".join(r.citations) + "]"
        justification = f"{_escape(r.justification)} {cites}".lstrip()
        cells = [_escape(r.factor), _escape(r.observed), rating, justification, _escape(r.control)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _split_cells(line: str) -> list[str]:
    body = line.strip()
    if body.startswith("|"):
        body = body[1:]
    cells, buf, i = [], [], 0
    trailing_pipe = False
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            buf.append(body[i + 1])
            i += 2
            continue
        if ch == "|":
            cells.append("".join(buf))
            buf = []
            trailing_pipe = i == len(body) - 1 or not body[i + 1:].strip()
            if trailing_pipe:
                break
        else:
            buf.append(ch)
        i += 1
    if not trailing_pipe:
        cells.append("".join(buf))
    return [c.strip() for c in cells]


def _is_header(cells: list[str]) -> bool:
    return [c.lower() for c in cells] == [h.lower() for h in HEADER]


def parse_section(domain: RiskDomain, raw: str, ledger: EvidenceLedger) -> SectionDraft:
    """Extract factor rows from *raw*.

    Rows citing ids absent from *ledger*, or citing nothing without the
    missing-info tag, are kept but forced to missing-info with rating 1 and a
    parse error. Rows with an unusable rating or the wrong cell count are
    dropped with a parse error. Raises :class:`UnparseableSection` when no
    row survives.
    """
    rows: list[RiskFactorRow] = []
    errors: list[str] = []
    prose: list[str] = []
    in_table = False
    seen = 0
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped.startswith("|"):
            in_table = False
            if stripped:
                prose.append(stripped)
            continue
        cells = _split_cells(stripped)
        if _is_header(cells):
            in_table = True
            continue
        filled = [c for c in cells if c]
        if not in_table or (filled and all(_SEPARATOR.match(c) for c in filled)):
            continue
        seen += 1
        where = f"row {seen}"
        if len(cells) != len(HEADER):
            errors.append(f"{where}: expected {len(HEADER)} columns, got {len(cells)}")
            continue
        factor, observed, rating_cell, justification, control = cells
        m = _RATING.match(rating_cell)
        if not m:
            errors.append(f"{where}: rating {rating_cell!r} is not an integer")
            continue
        rating = int(m.group(1))
        if rating not in (1, 2, 3, 4, 5):
            errors.append(f"{where}: rating out of range ({rating})")
            continue
        missing = m.group(2) is not None
        cm = _CITES.search(justification)
        citations: tuple[str, ...] = ()
        if cm:
            citations = tuple(c.strip() for c in cm.group(1).split(",") if c.strip())
            justification = justification[: cm.start()].rstrip()
        unknown = [c for c in citations if c not in ledger]
        if unknown:
            errors.append(f"{where}: unknown citation id(s) {', '.join(unknown)}; marked missing-info")
            citations = tuple(c for c in citations if c in ledger)
            missing = True
        elif not citations and not missing:
            errors.append(f"{where}: no citations; marked missing-info")
            missing = True
        if missing and rating != 1:
            if m.group(2) is not None:
                errors.append(f"{where}: missing-info row rated {rating}; coerced to 1")
            rating = 1
        rows.append(
            RiskFactorRow(
                factor=factor,
                observed=observed,
                rating=rating,
                justification=justification,
                control=control,
                citations=citations,
                missing_info=missing,
            )
        )
    if not rows:
        raise UnparseableSection("unparseable section", errors)
    return SectionDraft(
        domain=RiskDomain(domain),
        raw_text=raw,
        rows=tuple(rows),
        errors=tuple(errors),
        narrative="\n".join(prose),
        table_rows=seen,
    )
