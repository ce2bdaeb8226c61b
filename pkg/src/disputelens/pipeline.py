"""Orchestration of case-file summarization.

Part-wise strategies issue one completion per part in a fixed order and
assemble the results; the single-prompt strategy issues one completion and
parses all six parts out of it. A part whose output fails to parse is
re-prompted (same prompt, the model's sampling does the variation) a bounded
number of times before the case fails.
"""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import GatewayError, PartFailure, SummaryError
from .gateway import ChatProvider, CompletionRequest
from .models import (
    CaseFile,
    GenerationParams,
    MaterialSummary,
    PromptStrategy,
    SummaryPart,
    SUMMARY_PARTS,
)
from .parsing import (
    parse_evidence_list,
    parse_numbered_list,
    parse_overview,
    parse_sector_line,
    parse_whole_summary,
)
from .prompts import build_part_prompt

logger = logging.getLogger(__name__)

DEFAULT_PART_RETRIES = 2
DEFAULT_CHAR_BUDGET = 30_000


@dataclass(frozen=True)
class PartTrace:
    part: SummaryPart
    attempts: int
    prompt_sha256: str
    latency_ms: int


@dataclass(frozen=True)
class SummaryProvenance:
    case_id: str
    strategy: PromptStrategy
    model_name: str
    parts: tuple[PartTrace, ...]
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "strategy": self.strategy.value,
            "model_name": self.model_name,
            "parts": [
                {
                    "part": t.part.value,
                    "attempts": t.attempts,
                    "prompt_sha256": t.prompt_sha256,
                    "latency_ms": t.latency_ms,
                }
                for t in self.parts
            ],
            "warnings": list(self.warnings),
        }


@dataclass
class BatchOutcome:
    case_id: str
    summary: MaterialSummary | None = None
    error: Exception | None = None
    provenance: SummaryProvenance | None = None

    @property
    def ok(self) -> bool:
        return self.summary is not None


def truncate_case(case: CaseFile, char_budget: int) -> tuple[CaseFile, str | None]:
    """Fit a case into the character budget.

    The complaint keeps its head (the grievance opens the document), the
    written statement keeps its tail (the substantive response closes it).
    """
    total = len(case.complaint_text) + len(case.written_statement_text)
    if total <= char_budget:
        return case, None
    half = char_budget // 2
    complaint = case.complaint_text
    statement = case.written_statement_text
    complaint_budget = max(1, half, char_budget - len(statement))
    statement_budget = char_budget - min(len(complaint), complaint_budget)
    truncated = CaseFile(
        id=case.id,
        complaint_text=complaint[:complaint_budget],
        written_statement_text=statement[len(statement) - statement_budget :]
        if statement_budget > 0
        else "",
        metadata=dict(case.metadata),
    )
    warning = (
        f"case {case.id} truncated from {total} to at most {char_budget} chars "
        f"(complaint tail and written-statement head dropped)"
    )
    logger.warning(warning)
    return truncated, warning


def _parse_part(part: SummaryPart, text: str):
    if part is SummaryPart.OVERVIEW:
        return parse_overview(text)
    if part is SummaryPart.SECTOR:
        return parse_sector_line(text)
    if part is SummaryPart.ISSUES:
        return tuple(parse_numbered_list(text))
    if part is SummaryPart.EVIDENCE_COMPLAINANT:
        return tuple(parse_evidence_list(text, "complainant"))
    if part is SummaryPart.EVIDENCE_OPPOSITE:
        return tuple(parse_evidence_list(text, "opposite"))
    if part is SummaryPart.RELIEFS:
        return tuple(parse_numbered_list(text))
    return parse_whole_summary(text)


class Summarizer:
    """Immutable-after-construction pipeline front end."""

    def __init__(
        self,
        provider: ChatProvider,
        strategy: PromptStrategy = PromptStrategy.PARTWISE_COT,
        model_name: str = "default",
        part_retries: int = DEFAULT_PART_RETRIES,
        char_budget: int = DEFAULT_CHAR_BUDGET,
        params: GenerationParams | None = None,
    ):
        if part_retries < 0:
            raise ValueError("part_retries must be >= 0")
        if char_budget < 1:
            raise ValueError("char_budget must be positive")
        self.provider = provider
        self.strategy = strategy
        self.model_name = model_name
        self.part_retries = part_retries
        self.char_budget = char_budget
        self.params = params

    def _run_part(self, part: SummaryPart, case: CaseFile) -> tuple[object, PartTrace]:
        bundle = build_part_prompt(part, self.strategy, case, self.params)
        request = CompletionRequest(
            system_prompt=bundle.system_prompt,
            user_prompt=bundle.user_prompt,
            params=bundle.params,
            model_name=self.model_name,
            metadata={"part": part.value, "case_id": case.id},
        )
        prompt_hash = hashlib.sha256(
            (bundle.system_prompt + "\x00" + bundle.user_prompt).encode("utf-8")
        ).hexdigest()
        attempts = 0
        last_error: Exception | None = None
        started = time.monotonic()
        while attempts <= self.part_retries:
            attempts += 1
            result = self.provider.complete(request)
            try:
                value = _parse_part(part, result.text)
            except SummaryError as exc:
                logger.debug("case %s part %s attempt %d failed: %s", case.id, part.value, attempts, exc)
                last_error = exc
                continue
            trace = PartTrace(
                part=part,
                attempts=attempts,
                prompt_sha256=prompt_hash,
                latency_ms=int((time.monotonic() - started) * 1000),
            )
            return value, trace
        assert last_error is not None
        raise PartFailure(part, attempts, last_error)

    def summarize_with_provenance(self, case: CaseFile) -> tuple[MaterialSummary, SummaryProvenance]:
        """Produce a validated summary or raise; never a partial one."""
        warnings: list[str] = []
        case, truncation = truncate_case(case, self.char_budget)
        if truncation:
            warnings.append(truncation)

        traces: list[PartTrace] = []
        if self.strategy is PromptStrategy.SINGLE_PROMPT:
            summary, trace = self._run_part(SummaryPart.WHOLE_SUMMARY, case)
            traces.append(trace)
        else:
            values: dict[SummaryPart, object] = {}
            for part in SUMMARY_PARTS:
                values[part], trace = self._run_part(part, case)
                traces.append(trace)
            summary = MaterialSummary(
                overview=values[SummaryPart.OVERVIEW],
                sector=values[SummaryPart.SECTOR],
                issues=values[SummaryPart.ISSUES],
                evidence_complainant=values[SummaryPart.EVIDENCE_COMPLAINANT],
                evidence_opposite=values[SummaryPart.EVIDENCE_OPPOSITE],
                reliefs=values[SummaryPart.RELIEFS],
            )
        summary.validate()
        provenance = SummaryProvenance(
            case_id=case.id,
            strategy=self.strategy,
            model_name=self.model_name,
            parts=tuple(traces),
            warnings=tuple(warnings),
        )
        return summary, provenance

    def summarize(self, case: CaseFile) -> MaterialSummary:
        return self.summarize_with_provenance(case)[0]

    def summarize_batch(self, cases, parallelism: int = 1) -> list[BatchOutcome]:
        """Per-case outcomes in input order; one failure never aborts the rest."""
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        cases = list(cases)
        if not cases:
            return []

        def run(case: CaseFile) -> BatchOutcome:
            try:
                summary, provenance = self.summarize_with_provenance(case)
                return BatchOutcome(case_id=case.id, summary=summary, provenance=provenance)
            except (SummaryError, GatewayError) as exc:
                logger.warning("case %s failed: %s", case.id, exc)
                return BatchOutcome(case_id=case.id, error=exc)

        if parallelism == 1:
            return [run(case) for case in cases]
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(run, cases))


def summarize_case(
    provider: ChatProvider,
    case: CaseFile,
    strategy: PromptStrategy = PromptStrategy.PARTWISE_COT,
    **kwargs,
) -> MaterialSummary:
    """One-shot convenience wrapper around :class:`Summarizer`."""
    return Summarizer(provider, strategy, **kwargs).summarize(case)
