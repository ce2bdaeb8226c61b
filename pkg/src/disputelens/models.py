"""Shared domain types.

All types here are immutable after construction and safe to share across
threads. Collections are coerced to tuples so instances hash and compare by
value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import InvalidSummary
from .sectors import SectorLabel


class PromptStrategy(enum.Enum):
    SINGLE_PROMPT = "single-prompt"
    PARTWISE_SR = "partwise-sr"
    PARTWISE_COT = "partwise-cot"


class SummaryPart(enum.Enum):
    OVERVIEW = "overview"
    SECTOR = "sector"
    ISSUES = "issues"
    EVIDENCE_COMPLAINANT = "evidence_complainant"
    EVIDENCE_OPPOSITE = "evidence_opposite"
    RELIEFS = "reliefs"
    WHOLE_SUMMARY = "whole_summary"


#: the six actual summary parts, in generation/assembly order
SUMMARY_PARTS: tuple[SummaryPart, ...] = (
    SummaryPart.OVERVIEW,
    SummaryPart.SECTOR,
    SummaryPart.ISSUES,
    SummaryPart.EVIDENCE_COMPLAINANT,
    SummaryPart.EVIDENCE_OPPOSITE,
    SummaryPart.RELIEFS,
)


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.7
    top_p: float = 0.95
    top_k: int = 50
    max_new_tokens: int = 512

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")


@dataclass(frozen=True)
class CaseFile:
    """A consumer dispute case: the complaint plus the written statement."""

    id: str
    complaint_text: str
    written_statement_text: str = ""
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("case id must be nonempty")
        if not self.complaint_text:
            raise ValueError("complaint_text must be nonempty")
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    def __hash__(self):
        return hash((self.id, self.complaint_text, self.written_statement_text))

    def __eq__(self, other):
        if not isinstance(other, CaseFile):
            return NotImplemented
        return (
            self.id == other.id
            and self.complaint_text == other.complaint_text
            and self.written_statement_text == other.written_statement_text
            and dict(self.metadata) == dict(other.metadata)
        )


@dataclass(frozen=True)
class MaterialSummary:
    """The six-part structured digest of a case file.

    Empty evidence tuples stand for "Nil". ``validate()`` enforces the
    completeness rules; parsers and the pipeline never hand out an instance
    that fails it.
    """

    overview: str
    sector: SectorLabel
    issues: tuple[str, ...]
    evidence_complainant: tuple[tuple[str, str], ...]
    evidence_opposite: tuple[tuple[str, str], ...]
    reliefs: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "issues", tuple(self.issues))
        object.__setattr__(
            self,
            "evidence_complainant",
            tuple((str(l), str(d)) for l, d in self.evidence_complainant),
        )
        object.__setattr__(
            self,
            "evidence_opposite",
            tuple((str(l), str(d)) for l, d in self.evidence_opposite),
        )
        object.__setattr__(self, "reliefs", tuple(self.reliefs))

    def validate(self) -> "MaterialSummary":
        problems = []
        if not self.overview.strip():
            problems.append("overview is empty")
        if not self.issues:
            problems.append("issues list is empty")
        if not self.reliefs:
            problems.append("reliefs list is empty")
        for prefix, items in (
            ("CE", self.evidence_complainant),
            ("OPE", self.evidence_opposite),
        ):
            for i, (label, desc) in enumerate(items, start=1):
                if label != f"{prefix}{i}":
                    problems.append(
                        f"evidence label {label!r} out of sequence, expected {prefix}{i}"
                    )
                if not desc.strip():
                    problems.append(f"evidence item {label} has empty description")
        if problems:
            raise InvalidSummary("; ".join(problems))
        return self


@dataclass(frozen=True)
class JudgmentRecord:
    """A historical judgment: metadata plus the expert-written brief."""

    id: str
    title: str
    citation: str
    sector: SectorLabel
    brief: str
    full_text: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("judgment id must be nonempty")
        if not self.brief:
            raise ValueError("judgment brief must be nonempty")


@dataclass(frozen=True)
class RankedJudgment:
    """One row of a similar-judgment result list."""

    judgment_id: str
    lexical_score: float
    semantic_score: float
    fused_score: float
    rank: int

    def __post_init__(self):
        if self.lexical_score < 0:
            raise ValueError("lexical_score must be >= 0")
        if not -1.0 - 1e-9 <= self.semantic_score <= 1.0 + 1e-9:
            raise ValueError("semantic_score must be within [-1, 1]")
        if not 0.0 - 1e-9 <= self.fused_score <= 1.0 + 1e-9:
            raise ValueError("fused_score must be within [0, 1]")
        if self.rank < 1:
            raise ValueError("rank must be a positive integer")
