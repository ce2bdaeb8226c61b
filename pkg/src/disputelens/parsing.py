"""Parsers that turn raw LLM output text into typed summary parts.

Tolerances are deliberate and bounded: heading spelling variants, optional
"Sector:-" prefixes, "." or ":" after evidence labels, and the literal "Nil"
for empty evidence. Anything beyond that is a parse error the pipeline may
retry.
"""

from __future__ import annotations

import logging
import re

from .errors import (
    EmptyListError,
    EvidenceParseError,
    MissingPartError,
    OverviewParseError,
    SectorParseError,
    UnknownSectorCode,
)
from .models import MaterialSummary, SummaryPart
from .sectors import SectorLabel, find_sector_suffix, sector_from_code

logger = logging.getLogger(__name__)

# "Sector:- <name>, <code>" with tolerant prefix and punctuation
_SECTOR_CODE_RE = re.compile(r"^(?P<name>.*?)[,，]\s*(?P<code>\d{3})\b")
_SECTOR_PREFIX_RE = re.compile(r"^\W*sector(?:\s*(?:&|and)\s*(?:sector\s+)?code)?\s*[:\-–]*\s*", re.IGNORECASE)

_LIST_MARKER_RE = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s+")
_NIL_RE = re.compile(r"\bnil\b", re.IGNORECASE)


def parse_overview(text: str) -> str:
    """Free-text overview; strips an optional "Overview:" lead-in."""
    body = re.sub(r"^\W*overview\s*[:\-–]*\s*", "", text.strip(), flags=re.IGNORECASE)
    body = body.strip()
    if not body:
        raise OverviewParseError("overview text is empty")
    return body


def parse_sector_line(text: str) -> SectorLabel:
    """Extract and validate a sector classification from model output.

    Scans line by line for the "<name>, <code>" shape (the "Sector:-" prefix
    and surrounding prose are optional); falls back to a bare code or a bare
    taxonomy name. When the stated name and code disagree, the code wins and
    a warning is logged, because codes key the retrieval corpus.
    """
    last_code_error: UnknownSectorCode | None = None
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        candidate = _SECTOR_PREFIX_RE.sub("", line).strip()
        if not candidate:
            continue
        m = _SECTOR_CODE_RE.match(candidate)
        if m:
            code = int(m.group("code"))
            named = find_sector_suffix(m.group("name").strip(" .:-"))
            try:
                sector = sector_from_code(code)
            except UnknownSectorCode as exc:
                if named is not None:
                    logger.warning(
                        "sector code %d is not in the taxonomy; using name %r",
                        code,
                        named.name,
                    )
                    return named
                last_code_error = exc
                continue
            if named is not None and named.code != sector.code:
                logger.warning(
                    "sector name %r conflicts with code %d; keeping the code",
                    named.name,
                    code,
                )
            return sector
        # bare code, e.g. "Sector:- 102"
        m = re.match(r"^(\d{3})\b", candidate)
        if m:
            try:
                return sector_from_code(int(m.group(1)))
            except UnknownSectorCode as exc:
                last_code_error = exc
                continue
        # name-only fallback, e.g. "Sector:- Insurance"
        named = find_sector_suffix(candidate.strip(" .:-"))
        if named is not None:
            return named
    if last_code_error is not None:
        raise last_code_error
    raise SectorParseError(f"no sector line found in {text!r}")


_EVIDENCE_PREFIXES = {"complainant": "CE", "opposite": "OPE"}


def parse_evidence_list(text: str, side: str) -> list[tuple[str, str]]:
    """Extract labeled evidence items for one side.

    ``side`` is "complainant" (CE labels) or "opposite" (OPE labels). Labels
    are renumbered to a consecutive 1..n regardless of gaps in the model
    output. The literal token "Nil" yields an empty list.
    """
    try:
        prefix = _EVIDENCE_PREFIXES[side]
    except KeyError:
        raise ValueError(f"side must be 'complainant' or 'opposite', got {side!r}") from None
    label_re = re.compile(
        rf"^\s*(?:[-*•]\s*)?{prefix}\s*(\d+)\s*[.:：\-]\s*(.+)$", re.IGNORECASE
    )
    items: list[str] = []
    for line in text.splitlines():
        m = label_re.match(line)
        if m:
            desc = m.group(2).strip()
            if desc:
                items.append(desc)
    if items:
        return [(f"{prefix}{i}", desc) for i, desc in enumerate(items, start=1)]
    if _NIL_RE.search(text):
        return []
    raise EvidenceParseError(
        f"no {prefix}-labeled evidence lines and no 'Nil' found for side {side!r}"
    )


def parse_numbered_list(text: str) -> list[str]:
    """Split text into list items on leading "1." / "1)" / "-" markers.

    Unmarked prose lines are dropped; when a model mixes commentary with the
    list, only the list survives.
    """
    items: list[str] = []
    for line in text.splitlines():
        m = _LIST_MARKER_RE.match(line)
        if m:
            item = line[m.end():].strip()
            if item:
                items.append(item)
    if not items:
        raise EmptyListError(f"no list items found in {text!r}")
    return items


# Heading vocabularies per part, tried longest-first on each line. A heading
# must sit at the start of a line (markdown/bold/numbering ornaments allowed)
# and end with a colon variant; trailing same-line content belongs to the
# segment.
_HEADING_VOCAB: dict[SummaryPart, tuple[str, ...]] = {
    SummaryPart.OVERVIEW: ("overview",),
    SummaryPart.SECTOR: (
        "sector and sector code",
        "sector & code",
        "sector and code",
        "sector code",
        "sector",
    ),
    SummaryPart.ISSUES: ("issues", "issue"),
    SummaryPart.EVIDENCE_COMPLAINANT: (
        "evidence presented by the complainant",
        "evidences presented by the complainant",
        "evidence by the complainant",
        "evidence - complainant",
        "evidence complainant",
        "complainant evidence",
    ),
    SummaryPart.EVIDENCE_OPPOSITE: (
        "evidence presented by the opposite party",
        "evidences presented by the opposite party",
        "evidence by the opposite party",
        "evidence - opposite party",
        "evidence opposite party",
        "opposite party evidence",
    ),
    SummaryPart.RELIEFS: (
        "reliefs sought",
        "relief sought",
        "reliefs claimed",
        "reliefs",
        "relief",
    ),
}

_SIX_PARTS = tuple(_HEADING_VOCAB)


def _normalize_heading(fragment: str) -> str:
    # strip markdown ornaments and numbering, unify dash/space runs
    s = fragment.strip().lower()
    s = re.sub(r"^[#*\d.)\s]+", "", s)
    s = s.replace("–", "-").replace("—", "-")
    s = re.sub(r"[-\s]+", " ", s).strip()
    return s


_NORMALIZED_VOCAB: dict[SummaryPart, frozenset[str]] = {
    part: frozenset(_normalize_heading(v) for v in variants)
    for part, variants in _HEADING_VOCAB.items()
}


def _match_heading(line: str) -> tuple[SummaryPart, str] | None:
    """Return (part, same-line remainder) when the line is a heading."""
    m = re.match(r"^\s*(?P<head>[^:：]{1,60}?)\s*(?::-|[:：])\s*(?P<rest>.*)$", line)
    if not m:
        return None
    head = _normalize_heading(m.group("head"))
    if not head:
        return None
    for part in _SIX_PARTS:
        if head in _NORMALIZED_VOCAB[part]:
            return part, m.group("rest").strip().strip("*").strip()
    return None


def split_summary_sections(text: str) -> dict[SummaryPart, str]:
    """Segment whole-summary text into per-part chunks by heading lines."""
    sections: dict[SummaryPart, list[str]] = {}
    current: SummaryPart | None = None
    for line in text.splitlines():
        matched = _match_heading(line)
        if matched:
            part, rest = matched
            if part not in sections:
                sections[part] = []
                current = part
                if rest:
                    sections[part].append(rest)
                continue
        if current is not None:
            sections[current].append(line)
    return {part: "\n".join(lines).strip() for part, lines in sections.items()}


def parse_whole_summary(text: str) -> MaterialSummary:
    """Parse a single-prompt response carrying all six labeled parts."""
    sections = split_summary_sections(text)
    missing = [part for part in _SIX_PARTS if part not in sections]
    if missing:
        raise MissingPartError(missing)
    return MaterialSummary(
        overview=parse_overview(sections[SummaryPart.OVERVIEW]),
        sector=parse_sector_line(sections[SummaryPart.SECTOR]),
        issues=tuple(parse_numbered_list(sections[SummaryPart.ISSUES])),
        evidence_complainant=tuple(
            parse_evidence_list(sections[SummaryPart.EVIDENCE_COMPLAINANT], "complainant")
        ),
        evidence_opposite=tuple(
            parse_evidence_list(sections[SummaryPart.EVIDENCE_OPPOSITE], "opposite")
        ),
        reliefs=tuple(parse_numbered_list(sections[SummaryPart.RELIEFS])),
    ).validate()


def render_summary_text(summary: MaterialSummary) -> str:
    """The canonical text form of a summary.

    Round-trips through :func:`parse_whole_summary` and doubles as the
    {original}/{generated} payload for judge prompts.
    """
    lines: list[str] = ["Overview:", summary.overview, ""]
    lines.append(f"Sector & Code: {summary.sector.name}, {summary.sector.code}")
    lines.append("")
    lines.append("Issues:")
    for i, issue in enumerate(summary.issues, start=1):
        lines.append(f"{i}. {issue}")
    lines.append("")
    lines.append("Evidence presented by the complainant:")
    if summary.evidence_complainant:
        for label, desc in summary.evidence_complainant:
            lines.append(f"{label}: {desc}")
    else:
        lines.append("Nil")
    lines.append("")
    lines.append("Evidence presented by the opposite party:")
    if summary.evidence_opposite:
        for label, desc in summary.evidence_opposite:
            lines.append(f"{label}: {desc}")
    else:
        lines.append("Nil")
    lines.append("")
    lines.append("Reliefs:")
    for i, relief in enumerate(summary.reliefs, start=1):
        lines.append(f"{i}. {relief}")
    return "\n".join(lines)
