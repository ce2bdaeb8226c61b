"""Rubric-prompted scoring of generated summaries against references.

Eight metrics: four on a 1-5 Likert scale, four binary Yes/No. The judge
model answers a rubric prompt and must embed its verdict in a
``<score>...</score>`` tag; decoding is pinned to temperature 0 so judge runs
are reproducible.
"""

from __future__ import annotations

import enum
import io
import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ConstantInput, JudgeFailure, NoScoreTag, OutOfScale
from .gateway import ChatProvider, CompletionRequest
from .metrics import bleu1, rouge_l, rouge_n, spearman
from .models import GenerationParams, MaterialSummary
from .parsing import render_summary_text


class Scale(enum.Enum):
    LIKERT = "likert"  # integers 1..5
    BINARY = "binary"  # Yes -> 1, No -> 0


class MetricKind(enum.Enum):
    OVERVIEW_ACCURACY = "OverviewAccuracy"
    OVERSIMPLIFICATION = "Oversimplification"
    OVERVIEW_RETRIEVAL = "OverviewRetrieval"
    ISSUES_ACCURACY = "IssuesAccuracy"
    EVIDENCE_ACCURACY = "EvidenceAccuracy"
    ISSUE_FORMATTING = "IssueFormatting"
    SECTOR_RELEVANCE = "SectorRelevance"
    RELIEF_ACCURACY = "ReliefAccuracy"

    @property
    def scale(self) -> Scale:
        return _SCALES[self]

    @property
    def column_label(self) -> str:
        return _COLUMNS[self]

    @property
    def template_name(self) -> str:
        return _TEMPLATES[self]


#: report column order
ALL_KINDS: tuple[MetricKind, ...] = (
    MetricKind.OVERVIEW_ACCURACY,
    MetricKind.OVERSIMPLIFICATION,
    MetricKind.OVERVIEW_RETRIEVAL,
    MetricKind.ISSUES_ACCURACY,
    MetricKind.EVIDENCE_ACCURACY,
    MetricKind.ISSUE_FORMATTING,
    MetricKind.SECTOR_RELEVANCE,
    MetricKind.RELIEF_ACCURACY,
)

_SCALES = {
    MetricKind.OVERVIEW_ACCURACY: Scale.LIKERT,
    MetricKind.OVERSIMPLIFICATION: Scale.LIKERT,
    MetricKind.OVERVIEW_RETRIEVAL: Scale.LIKERT,
    MetricKind.ISSUES_ACCURACY: Scale.LIKERT,
    MetricKind.EVIDENCE_ACCURACY: Scale.BINARY,
    MetricKind.ISSUE_FORMATTING: Scale.BINARY,
    MetricKind.SECTOR_RELEVANCE: Scale.BINARY,
    MetricKind.RELIEF_ACCURACY: Scale.BINARY,
}

_COLUMNS = {
    MetricKind.OVERVIEW_ACCURACY: "Over. Acc.",
    MetricKind.OVERSIMPLIFICATION: "Oversimp.",
    MetricKind.OVERVIEW_RETRIEVAL: "Over. Retr.",
    MetricKind.ISSUES_ACCURACY: "Iss. Acc.",
    MetricKind.EVIDENCE_ACCURACY: "Evid. Acc.",
    MetricKind.ISSUE_FORMATTING: "Iss. Form.",
    MetricKind.SECTOR_RELEVANCE: "Sect. Rel.",
    MetricKind.RELIEF_ACCURACY: "Rel. Acc.",
}

_TEMPLATES = {
    MetricKind.OVERVIEW_ACCURACY: "overview_accuracy",
    MetricKind.OVERSIMPLIFICATION: "oversimplification",
    MetricKind.OVERVIEW_RETRIEVAL: "overview_retrieval",
    MetricKind.ISSUES_ACCURACY: "issues_accuracy",
    MetricKind.EVIDENCE_ACCURACY: "evidence_accuracy",
    MetricKind.ISSUE_FORMATTING: "issue_formatting",
    MetricKind.SECTOR_RELEVANCE: "sector_relevance",
    MetricKind.RELIEF_ACCURACY: "relief_accuracy",
}


def metric_kind_from_name(name: str) -> MetricKind:
    for kind in MetricKind:
        if kind.value.lower() == name.strip().lower():
            return kind
    raise KeyError(name)


#: deterministic decoding for judging
JUDGE_PARAMS = GenerationParams(temperature=0.0, top_p=1.0, top_k=1, max_new_tokens=768)

JUDGE_SYSTEM_PROMPT = (
    "You are a meticulous evaluator of consumer-case material summaries. "
    "Follow the task description exactly and end your response with the "
    "requested <score></score> tag."
)

_SCORE_TAG_RE = re.compile(r"<score>\s*(.*?)\s*</score>", re.IGNORECASE | re.DOTALL)
_LIKERT_RE = re.compile(r"^\[?([0-9]+)\]?$")


@dataclass(frozen=True)
class MetricScore:
    kind: MetricKind
    value: float
    rationale_text: str | None = None

    def __post_init__(self):
        check_in_scale(self.kind, self.value)


def check_in_scale(kind: MetricKind, value: float) -> None:
    if kind.scale is Scale.LIKERT:
        if value not in (1, 2, 3, 4, 5):
            raise OutOfScale(f"{kind.value} expects an integer 1..5, got {value!r}")
    else:
        if value not in (0, 1):
            raise OutOfScale(f"{kind.value} expects 0 or 1, got {value!r}")


def parse_score_tag(text: str, scale: Scale) -> int:
    """Extract the verdict from the last ``<score>...</score>`` span."""
    matches = _SCORE_TAG_RE.findall(text)
    if not matches:
        raise NoScoreTag("no <score></score> tag in judge output")
    content = matches[-1].strip().strip(".")
    if scale is Scale.LIKERT:
        m = _LIKERT_RE.match(content)
        if not m:
            raise OutOfScale(f"not a Likert integer: {content!r}")
        value = int(m.group(1))
        if not 1 <= value <= 5:
            raise OutOfScale(f"Likert score {value} outside 1..5")
        return value
    lowered = content.lower()
    if lowered == "yes":
        return 1
    if lowered == "no":
        return 0
    raise OutOfScale(f"not a Yes/No verdict: {content!r}")


def judge_summary(
    kind: MetricKind,
    original: MaterialSummary,
    generated: MaterialSummary,
    judge_provider: ChatProvider,
    model_name: str = "judge",
    case_id: str = "",
    retries: int = 2,
) -> MetricScore:
    """Score one (reference, generated) pair on one metric.

    Malformed judge output (missing tag, out-of-scale verdict) is retried up
    to ``retries`` additional times before raising :class:`JudgeFailure`.
    """
    from .prompts import render_judge_prompt

    prompt = render_judge_prompt(
        kind.template_name,
        render_summary_text(original),
        render_summary_text(generated),
    )
    request = CompletionRequest(
        system_prompt=JUDGE_SYSTEM_PROMPT,
        user_prompt=prompt,
        params=JUDGE_PARAMS,
        model_name=model_name,
        metadata={"part": f"judge:{kind.value}", "case_id": case_id or "*"},
    )
    last_error: Exception | None = None
    for _ in range(retries + 1):
        result = judge_provider.complete(request)
        try:
            value = parse_score_tag(result.text, kind.scale)
        except (NoScoreTag, OutOfScale) as exc:
            last_error = exc
            continue
        return MetricScore(kind=kind, value=value, rationale_text=result.text)
    assert last_error is not None
    raise JudgeFailure(kind, last_error)


REFERENCE_METRIC_NAMES = ("rouge1_f", "rouge2_f", "rougeL_f", "bleu1")

#: settings header embedded in every report, since the exact metric variants
#: matter when comparing numbers across tools
REPORT_HEADER = {
    "rouge": "per-pair P/R/F1 with clipped n-gram counts; aggregate is the mean of per-pair F1",
    "bleu1": "sentence-level modified unigram precision, no smoothing, brevity penalty min(1, exp(1-ref/cand))",
    "judge_decoding": "temperature=0.0, top_p=1.0, top_k=1",
    "scales": "Likert metrics 1-5, binary metrics 0/1",
}


def reference_scores(original: MaterialSummary, generated: MaterialSummary) -> dict[str, dict[str, float]]:
    """ROUGE/BLEU for one pair, over the overview alone and the full rendering."""
    out: dict[str, dict[str, float]] = {}
    for scope, cand, ref in (
        ("overview", generated.overview, original.overview),
        ("summary", render_summary_text(generated), render_summary_text(original)),
    ):
        r1 = rouge_n(cand, ref, 1)
        r2 = rouge_n(cand, ref, 2)
        rl = rouge_l(cand, ref)
        out[scope] = {
            "rouge1_f": r1.f1,
            "rouge2_f": r2.f1,
            "rougeL_f": rl.f1,
            "bleu1": bleu1(cand, ref),
        }
    return out


@dataclass
class MetricReport:
    """Aggregate of one evaluation run (the per-model table row shape)."""

    n: int
    kinds: tuple[MetricKind, ...]
    means: dict[MetricKind, float]
    scored: dict[MetricKind, int]
    failures: dict[MetricKind, int]
    matrix: dict[str, dict[MetricKind, float]]
    rationales: dict[str, dict[MetricKind, str]]
    reference_means: dict[str, dict[str, float]]
    reference_per_case: dict[str, dict[str, dict[str, float]]]
    header: dict[str, str] = field(default_factory=lambda: dict(REPORT_HEADER))

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "header": self.header,
            "n": self.n,
            "kinds": [k.value for k in self.kinds],
            "means": {k.value: self.means[k] for k in self.kinds if k in self.means},
            "scored": {k.value: self.scored.get(k, 0) for k in self.kinds},
            "failures": {k.value: self.failures.get(k, 0) for k in self.kinds},
            "matrix": {
                case_id: {k.value: v for k, v in row.items()}
                for case_id, row in self.matrix.items()
            },
            "rationales": {
                case_id: {k.value: v for k, v in row.items()}
                for case_id, row in self.rationales.items()
            },
            "reference_means": self.reference_means,
            "reference_per_case": self.reference_per_case,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "MetricReport":
        kinds = tuple(metric_kind_from_name(k) for k in data["kinds"])
        return cls(
            n=int(data["n"]),
            kinds=kinds,
            means={metric_kind_from_name(k): v for k, v in data["means"].items()},
            scored={metric_kind_from_name(k): v for k, v in data["scored"].items()},
            failures={metric_kind_from_name(k): v for k, v in data["failures"].items()},
            matrix={
                case_id: {metric_kind_from_name(k): v for k, v in row.items()}
                for case_id, row in data["matrix"].items()
            },
            rationales={
                case_id: {metric_kind_from_name(k): v for k, v in row.items()}
                for case_id, row in data.get("rationales", {}).items()
            },
            reference_means=data["reference_means"],
            reference_per_case=data["reference_per_case"],
            header=dict(data.get("header", {})),
        )

    def to_csv(self, run_label: str = "run") -> str:
        """One aggregate row in the fixed eight-column order."""
        buf = io.StringIO()
        labels = [k.column_label for k in ALL_KINDS]
        buf.write(",".join(["Model Name"] + labels) + "\n")
        cells = [run_label]
        for kind in ALL_KINDS:
            if kind in self.means:
                cells.append(f"{self.means[kind]:.4f}")
            else:
                cells.append("")
        buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def evaluate_run(
    pairs: Sequence[tuple[MaterialSummary, MaterialSummary]],
    kinds: Sequence[MetricKind] = ALL_KINDS,
    judge_provider: ChatProvider | None = None,
    pair_ids: Sequence[str] | None = None,
    model_name: str = "judge",
    retries: int = 2,
) -> MetricReport:
    """Judge every pair on every metric and aggregate.

    ``pairs`` are (original/reference, generated). A pair that fails judging
    on some metric is dropped from that metric's mean and counted as a
    failure. Reference-based metrics are always computed. With no judge
    provider only the reference metrics are produced.
    """
    if not pairs:
        raise ValueError("evaluate_run requires at least one pair")
    if pair_ids is None:
        pair_ids = [f"pair-{i:04d}" for i in range(1, len(pairs) + 1)]
    if len(pair_ids) != len(pairs):
        raise ValueError("pair_ids must align with pairs")

    kinds = tuple(kinds)
    matrix: dict[str, dict[MetricKind, float]] = {pid: {} for pid in pair_ids}
    rationales: dict[str, dict[MetricKind, str]] = {pid: {} for pid in pair_ids}
    scored: dict[MetricKind, int] = {k: 0 for k in kinds}
    failures: dict[MetricKind, int] = {k: 0 for k in kinds}
    sums: dict[MetricKind, float] = {k: 0.0 for k in kinds}

    if judge_provider is not None:
        for pid, (original, generated) in zip(pair_ids, pairs):
            for kind in kinds:
                try:
                    score = judge_summary(
                        kind,
                        original,
                        generated,
                        judge_provider,
                        model_name=model_name,
                        case_id=pid,
                        retries=retries,
                    )
                except JudgeFailure:
                    failures[kind] += 1
                    continue
                matrix[pid][kind] = score.value
                if score.rationale_text:
                    rationales[pid][kind] = score.rationale_text
                scored[kind] += 1
                sums[kind] += score.value

    means = {k: sums[k] / scored[k] for k in kinds if scored[k] > 0}

    reference_per_case: dict[str, dict[str, dict[str, float]]] = {}
    ref_sums: dict[str, dict[str, float]] = {
        "overview": {m: 0.0 for m in REFERENCE_METRIC_NAMES},
        "summary": {m: 0.0 for m in REFERENCE_METRIC_NAMES},
    }
    for pid, (original, generated) in zip(pair_ids, pairs):
        per_case = reference_scores(original, generated)
        reference_per_case[pid] = per_case
        for scope in ref_sums:
            for m in REFERENCE_METRIC_NAMES:
                ref_sums[scope][m] += per_case[scope][m]
    reference_means = {
        scope: {m: total / len(pairs) for m, total in by_metric.items()}
        for scope, by_metric in ref_sums.items()
    }

    return MetricReport(
        n=len(pairs),
        kinds=kinds,
        means=means,
        scored=scored,
        failures=failures,
        matrix=matrix,
        rationales=rationales,
        reference_means=reference_means,
        reference_per_case=reference_per_case,
    )


def correlate_with_human(
    report: MetricReport,
    human_scores: Mapping[tuple[str, MetricKind], float],
) -> dict[MetricKind, float]:
    """Spearman correlation between judge and human scores, per metric.

    Only cases scored by both sides enter a metric's correlation; metrics
    with fewer than two shared cases or a constant vector are omitted.
    """
    out: dict[MetricKind, float] = {}
    for kind in report.kinds:
        judge_vec: list[float] = []
        human_vec: list[float] = []
        for case_id, row in sorted(report.matrix.items()):
            if kind in row and (case_id, kind) in human_scores:
                judge_vec.append(row[kind])
                human_vec.append(human_scores[(case_id, kind)])
        if len(judge_vec) < 2:
            continue
        try:
            out[kind] = spearman(human_vec, judge_vec)
        except ConstantInput:
            continue
    return out
