"""Prompt construction for the three summarization strategies.

Templates live under ``templates/`` as plain UTF-8 text assets keyed by
(strategy, part) so they can be edited without touching code. The judge
rubrics (``templates/judge/``) carry ``{original}`` / ``{generated}``
placeholders.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import UnsupportedCombination
from ..models import CaseFile, GenerationParams, PromptStrategy, SummaryPart

# fixed decoding defaults for generation
DEFAULT_TEMPERATURE = 0.7
DEFAULT_TOP_P = 0.95
DEFAULT_TOP_K = 50

# max_new_tokens per part: the sector line is tiny, reliefs and evidence are
# short lists, overview/issues need room, and the monolithic prompt needs the
# most.
PART_BUDGETS: dict[SummaryPart, int] = {
    SummaryPart.OVERVIEW: 512,
    SummaryPart.SECTOR: 16,
    SummaryPart.ISSUES: 512,
    SummaryPart.EVIDENCE_COMPLAINANT: 256,
    SummaryPart.EVIDENCE_OPPOSITE: 256,
    SummaryPart.RELIEFS: 256,
    SummaryPart.WHOLE_SUMMARY: 2048,
}

_STRATEGY_DIRS = {
    PromptStrategy.SINGLE_PROMPT: "single_prompt",
    PromptStrategy.PARTWISE_SR: "partwise_sr",
    PromptStrategy.PARTWISE_COT: "partwise_cot",
}


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    user_prompt: str
    part: SummaryPart
    strategy: PromptStrategy
    params: GenerationParams

    def __post_init__(self):
        whole = self.part is SummaryPart.WHOLE_SUMMARY
        single = self.strategy is PromptStrategy.SINGLE_PROMPT
        if whole != single:
            raise UnsupportedCombination(
                f"part {self.part.value} is not valid under strategy "
                f"{self.strategy.value}"
            )


@lru_cache(maxsize=None)
def load_template(strategy: PromptStrategy, part: SummaryPart) -> str:
    directory = _STRATEGY_DIRS[strategy]
    ref = resources.files(__package__) / "templates" / directory / f"{part.value}.txt"
    return ref.read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_judge_template(name: str) -> str:
    ref = resources.files(__package__) / "templates" / "judge" / f"{name}.txt"
    return ref.read_text(encoding="utf-8")


def render_case_text(case: CaseFile) -> str:
    """The user-turn payload: complaint first, then the written statement."""
    parts = [f"Case file {case.id}", "", "Complaint:", case.complaint_text]
    if case.written_statement_text:
        parts += ["", "Written statement:", case.written_statement_text]
    else:
        parts += ["", "Written statement: not provided."]
    return "\n".join(parts)


def build_part_prompt(
    part: SummaryPart,
    strategy: PromptStrategy,
    case: CaseFile,
    params: GenerationParams | None = None,
) -> PromptBundle:
    """Assemble the prompt for one summary part.

    Pure: identical inputs always produce an identical bundle. ``params``
    overrides the decoding defaults but the token budget always follows
    ``PART_BUDGETS``.
    """
    if strategy is PromptStrategy.SINGLE_PROMPT and part is not SummaryPart.WHOLE_SUMMARY:
        raise UnsupportedCombination(
            f"single-prompt strategy generates the whole summary at once, "
            f"not part {part.value}"
        )
    if strategy is not PromptStrategy.SINGLE_PROMPT and part is SummaryPart.WHOLE_SUMMARY:
        raise UnsupportedCombination(
            f"strategy {strategy.value} generates parts individually"
        )
    if params is None:
        params = GenerationParams(
            temperature=DEFAULT_TEMPERATURE,
            top_p=DEFAULT_TOP_P,
            top_k=DEFAULT_TOP_K,
            max_new_tokens=PART_BUDGETS[part],
        )
    else:
        params = GenerationParams(
            temperature=params.temperature,
            top_p=params.top_p,
            top_k=params.top_k,
            max_new_tokens=PART_BUDGETS[part],
        )
    return PromptBundle(
        system_prompt=load_template(strategy, part),
        user_prompt=render_case_text(case),
        part=part,
        strategy=strategy,
        params=params,
    )


def render_judge_prompt(name: str, original_text: str, generated_text: str) -> str:
    template = load_judge_template(name)
    return template.replace("{original}", original_text).replace(
        "{generated}", generated_text
    )
