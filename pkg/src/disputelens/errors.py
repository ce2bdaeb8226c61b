"""Error taxonomy.

Every exception carries a stable machine-readable ``code`` (used in API error
bodies) and an ``exit_code`` family (used by the CLI):

    2  usage (handled by click)
    3  corpus / config / persistence
    4  provider transport and protocol
    5  summary parsing and generation
    6  retrieval
    7  evaluation
"""

from __future__ import annotations


class DisputeLensError(Exception):
    code = "error"
    exit_code = 1


# -- corpus / config / persistence (3) --------------------------------------

class CorpusError(DisputeLensError):
    code = "corpus_error"
    exit_code = 3


class ParseError(CorpusError):
    """Malformed record in a corpus file; carries the 1-based line number."""

    code = "parse_error"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class InvalidSector(ParseError):
    code = "invalid_sector"


class DuplicateId(CorpusError):
    code = "duplicate_id"


class UnknownMetric(CorpusError):
    code = "unknown_metric"


class StaleIndex(CorpusError):
    code = "stale_index"


class ConfigError(DisputeLensError):
    code = "config_error"
    exit_code = 3


class BindError(ConfigError):
    code = "bind_error"


# -- provider (4) ------------------------------------------------------------

class GatewayError(DisputeLensError):
    code = "gateway_error"
    exit_code = 4


class TransportError(GatewayError):
    code = "transport_error"


class Timeout(TransportError):
    code = "timeout"


class ProviderError(GatewayError):
    code = "provider_error"

    def __init__(self, status: int, body: str = ""):
        super().__init__(f"provider returned status {status}: {body[:200]}")
        self.status = status
        self.body = body


class UnscriptedRequest(GatewayError):
    code = "unscripted_request"


class DimensionMismatch(GatewayError):
    code = "dimension_mismatch"


class ZeroVector(GatewayError):
    code = "zero_vector"


# -- summary parsing and generation (5) --------------------------------------

class SummaryError(DisputeLensError):
    code = "summary_error"
    exit_code = 5


class UnknownSectorCode(SummaryError):
    code = "unknown_sector_code"


class UnknownSectorName(SummaryError):
    code = "unknown_sector_name"


class SectorParseError(SummaryError):
    code = "sector_parse_error"


class OverviewParseError(SummaryError):
    code = "overview_parse_error"


class EvidenceParseError(SummaryError):
    code = "evidence_parse_error"


class EmptyListError(SummaryError):
    code = "empty_list"


class MissingPartError(SummaryError):
    """Raised by whole-summary parsing; names every absent part."""

    code = "missing_part"

    def __init__(self, parts):
        self.parts = tuple(parts)
        names = ", ".join(p.value for p in self.parts)
        super().__init__(f"summary text is missing parts: {names}")


class InvalidSummary(SummaryError):
    code = "invalid_summary"


class UnsupportedCombination(SummaryError):
    code = "unsupported_combination"


class PartFailure(SummaryError):
    code = "part_failure"

    def __init__(self, part, attempts: int, last_error: Exception):
        super().__init__(
            f"part {part.value} failed after {attempts} attempts: {last_error}"
        )
        self.part = part
        self.attempts = attempts
        self.last_error = last_error


# -- retrieval (6) ------------------------------------------------------------

class RetrievalError(DisputeLensError):
    code = "retrieval_error"
    exit_code = 6


class DuplicateDocId(RetrievalError):
    code = "duplicate_doc_id"


class UnknownDocId(RetrievalError):
    code = "unknown_doc_id"


# -- evaluation (7) ------------------------------------------------------------

class EvaluationError(DisputeLensError):
    code = "evaluation_error"
    exit_code = 7


class LengthMismatch(EvaluationError):
    code = "length_mismatch"


class ConstantInput(EvaluationError):
    code = "constant_input"


class EmptyRetrieval(EvaluationError):
    code = "empty_retrieval"


class NoScoreTag(EvaluationError):
    code = "no_score_tag"


class OutOfScale(EvaluationError):
    code = "out_of_scale"


class JudgeFailure(EvaluationError):
    code = "judge_failure"

    def __init__(self, kind, last_error: Exception):
        super().__init__(f"judging {kind.value} failed: {last_error}")
        self.kind = kind
        self.last_error = last_error
