"""Ingestion, validation, and persistence.

Corpora are JSONL (one record per line) so every validation error can name
its line. Writes are whole-file atomic: write to a temp sibling, then rename.
Retrieval indexes embed the corpus content hash and refuse to load against a
different corpus.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateId,
    InvalidSector,
    InvalidSummary,
    OutOfScale,
    ParseError,
    StaleIndex,
    UnknownMetric,
    UnknownSectorCode,
)
from .judge import MetricKind, check_in_scale, metric_kind_from_name
from .models import CaseFile, JudgmentRecord, MaterialSummary
from .retrieval import Bm25Index, Bm25Params, SemanticIndex
from .sectors import sector_from_code

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _scan_jsonl(path: str | Path) -> Iterable[tuple[int, dict | None, ParseError | None]]:
    """Yield (line_no, record, error) per nonempty line; never raises mid-file."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                record = json.loads(stripped)
            except json.JSONDecodeError as exc:
                yield line_no, None, ParseError(f"invalid JSON: {exc.msg}", line=line_no)
                continue
            if not isinstance(record, dict):
                yield line_no, None, ParseError("record is not a JSON object", line=line_no)
                continue
            yield line_no, record, None


def _iter_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    for line_no, record, error in _scan_jsonl(path):
        if error is not None:
            raise error
        yield line_no, record


def _require(record: dict, key: str, line: int) -> object:
    if key not in record or record[key] in (None, ""):
        raise ParseError(f"missing required field {key!r}", line=line)
    return record[key]


def _judgment_from_record(record: dict, line: int) -> JudgmentRecord:
    code = _require(record, "sector_code", line)
    try:
        sector = sector_from_code(int(code))
    except (TypeError, ValueError):
        raise InvalidSector(f"sector_code {code!r} is not an integer", line=line) from None
    except UnknownSectorCode:
        raise InvalidSector(f"sector_code {code!r} is not in the taxonomy", line=line) from None
    name = record.get("sector_name")
    if name and name.strip().lower() != sector.name.lower():
        logger.warning(
            "line %d: sector_name %r does not match code %d (%s); keeping the code",
            line,
            name,
            sector.code,
            sector.name,
        )
    try:
        return JudgmentRecord(
            id=str(_require(record, "id", line)),
            title=str(record.get("title", "")),
            citation=str(record.get("citation", "")),
            sector=sector,
            brief=str(_require(record, "brief", line)),
            full_text=record.get("full_text"),
        )
    except ValueError as exc:
        raise ParseError(str(exc), line=line) from exc


def _case_from_record(record: dict, line: int) -> CaseFile:
    metadata = record.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object", line=line)
    try:
        return CaseFile(
            id=str(_require(record, "id", line)),
            complaint_text=str(_require(record, "complaint_text", line)),
            written_statement_text=str(record.get("written_statement_text", "")),
            metadata={str(k): str(v) for k, v in metadata.items()},
        )
    except ValueError as exc:
        raise ParseError(str(exc), line=line) from exc


def _load_records(path, builder, collect_errors):
    records = []
    seen_ids: dict[str, int] = {}
    for line_no, record, scan_error in _scan_jsonl(path):
        try:
            if scan_error is not None:
                raise scan_error
            built = builder(record, line_no)
            if built.id in seen_ids:
                raise DuplicateId(
                    f"line {line_no}: id {built.id!r} already used on line {seen_ids[built.id]}"
                )
            seen_ids[built.id] = line_no
            records.append(built)
        except (ParseError, DuplicateId) as exc:
            if collect_errors is None:
                raise
            collect_errors.append(exc)
    if not records:
        logger.warning("no records loaded from %s", path)
    return records


def load_judgments(path: str | Path, collect_errors: list | None = None) -> list[JudgmentRecord]:
    """Load the judgment corpus.

    With ``collect_errors`` set to a list, malformed lines are appended there
    as located errors and the valid records are still returned; otherwise the
    first bad line raises.
    """
    return _load_records(path, _judgment_from_record, collect_errors)


def load_case_files(path: str | Path, collect_errors: list | None = None) -> list[CaseFile]:
    return _load_records(path, _case_from_record, collect_errors)


def judgment_to_record(j: JudgmentRecord) -> dict:
    record = {
        "schema_version": SCHEMA_VERSION,
        "id": j.id,
        "title": j.title,
        "citation": j.citation,
        "sector_name": j.sector.name,
        "sector_code": j.sector.code,
        "brief": j.brief,
    }
    if j.full_text is not None:
        record["full_text"] = j.full_text
    return record


def case_to_record(c: CaseFile) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": c.id,
        "complaint_text": c.complaint_text,
        "written_statement_text": c.written_statement_text,
        "metadata": dict(c.metadata),
    }


def save_jsonl(path: str | Path, records: Sequence[dict]) -> None:
    lines = "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)
    atomic_write_text(path, lines)


# -- material summaries -------------------------------------------------------


def summary_to_dict(summary: MaterialSummary) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "overview": summary.overview,
        "sector": {"name": summary.sector.name, "code": summary.sector.code},
        "issues": list(summary.issues),
        "evidence_complainant": [
            {"label": label, "description": desc}
            for label, desc in summary.evidence_complainant
        ],
        "evidence_opposite": [
            {"label": label, "description": desc}
            for label, desc in summary.evidence_opposite
        ],
        "reliefs": list(summary.reliefs),
    }


def summary_from_dict(data: dict, line: int | None = None) -> MaterialSummary:
    try:
        sector = sector_from_code(int(data["sector"]["code"]))
        summary = MaterialSummary(
            overview=str(data["overview"]),
            sector=sector,
            issues=tuple(str(i) for i in data["issues"]),
            evidence_complainant=tuple(
                (str(e["label"]), str(e["description"]))
                for e in data["evidence_complainant"]
            ),
            evidence_opposite=tuple(
                (str(e["label"]), str(e["description"]))
                for e in data["evidence_opposite"]
            ),
            reliefs=tuple(str(r) for r in data["reliefs"]),
        )
    except UnknownSectorCode as exc:
        raise InvalidSector(str(exc), line=line) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed summary record: {exc!r}", line=line) from exc
    try:
        return summary.validate()
    except InvalidSummary as exc:
        raise ParseError(f"summary violates invariants: {exc}", line=line) from exc


def save_summary(path: str | Path, summary: MaterialSummary, case_id: str | None = None) -> None:
    data = summary_to_dict(summary)
    if case_id is not None:
        data["case_id"] = case_id
    atomic_write_text(path, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def load_summary(path: str | Path) -> MaterialSummary:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid summary JSON in {path}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"summary file {path} is not a JSON object")
    return summary_from_dict(data)


def save_summaries_jsonl(path: str | Path, rows: Sequence[tuple[str, MaterialSummary]]) -> None:
    records = []
    for case_id, summary in rows:
        record = summary_to_dict(summary)
        record["case_id"] = case_id
        records.append(record)
    save_jsonl(path, records)


def load_summaries_jsonl(path: str | Path) -> list[tuple[str, MaterialSummary]]:
    rows = []
    for line_no, record in _iter_jsonl(path):
        case_id = str(_require(record, "case_id", line_no))
        rows.append((case_id, summary_from_dict(record, line=line_no)))
    return rows


# -- human evaluation scores ---------------------------------------------------


def load_human_scores(path: str | Path) -> dict[tuple[str, MetricKind], float]:
    """CSV of (case_id, metric, score); duplicate keys keep the last value."""
    scores: dict[tuple[str, MetricKind], float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"case_id", "metric", "score"}
        if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
            raise ParseError(f"human scores CSV must have columns {sorted(required)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                kind = metric_kind_from_name(row["metric"])
            except KeyError:
                raise UnknownMetric(
                    f"line {line_no}: unknown metric {row['metric']!r}"
                ) from None
            try:
                value = float(row["score"])
            except ValueError:
                raise OutOfScale(f"line {line_no}: score {row['score']!r} is not numeric") from None
            try:
                check_in_scale(kind, value)
            except OutOfScale as exc:
                raise OutOfScale(f"line {line_no}: {exc}") from None
            key = (row["case_id"], kind)
            if key in scores:
                logger.warning(
                    "line %d: duplicate score for (%s, %s); keeping the last value",
                    line_no,
                    key[0],
                    kind.value,
                )
            scores[key] = value
    return scores


# -- retrieval index persistence -------------------------------------------------


def corpus_content_hash(judgments: Sequence[JudgmentRecord]) -> str:
    hasher = hashlib.sha256()
    for j in sorted(judgments, key=lambda r: r.id):
        hasher.update(
            json.dumps(judgment_to_record(j), ensure_ascii=False, sort_keys=True).encode("utf-8")
        )
        hasher.update(b"\n")
    return hasher.hexdigest()


def save_bm25_index(path: str | Path, index: Bm25Index, corpus_hash: str) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "bm25",
        "corpus_sha256": corpus_hash,
        "params": {"k1": index.params.k1, "b": index.params.b},
        "avgdl": index.avgdl,
        "n_docs": index.n_docs,
        "doc_lengths": index.doc_lengths,
        "doc_sectors": {d: s.code for d, s in index.doc_sectors.items()},
        "postings": {term: [list(p) for p in rows] for term, rows in index.postings.items()},
    }
    atomic_write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True))


def load_bm25_index(path: str | Path, expected_corpus_hash: str) -> Bm25Index:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("kind") != "bm25":
        raise ParseError(f"{path} is not a bm25 index file")
    if payload.get("corpus_sha256") != expected_corpus_hash:
        raise StaleIndex(
            f"index {path} was built from a different corpus "
            f"(stored {payload.get('corpus_sha256')!r})"
        )
    return Bm25Index(
        postings={
            term: tuple((doc_id, int(tf)) for doc_id, tf in rows)
            for term, rows in payload["postings"].items()
        },
        doc_lengths={d: int(v) for d, v in payload["doc_lengths"].items()},
        avgdl=float(payload["avgdl"]),
        n_docs=int(payload["n_docs"]),
        doc_sectors={d: sector_from_code(int(c)) for d, c in payload["doc_sectors"].items()},
        params=Bm25Params(float(payload["params"]["k1"]), float(payload["params"]["b"])),
    )


def save_semantic_index(path: str | Path, index: SemanticIndex, corpus_hash: str) -> None:
    import io

    meta = {
        "schema_version": SCHEMA_VERSION,
        "kind": "embeddings",
        "corpus_sha256": corpus_hash,
        "embedder_key": index.embedder_key,
        "doc_sectors": {d: s.code for d, s in index.doc_sectors.items()},
    }
    buf = io.BytesIO()
    np.savez_compressed(
        buf,
        matrix=index.matrix,
        doc_ids=np.asarray(index.doc_ids, dtype=str),
        meta=np.asarray([json.dumps(meta, sort_keys=True)], dtype=str),
    )
    atomic_write_bytes(path, buf.getvalue())


def load_semantic_index(
    path: str | Path,
    expected_corpus_hash: str,
    expected_embedder_key: str | None = None,
) -> SemanticIndex:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"][0]))
        matrix = np.asarray(data["matrix"], dtype=np.float64)
        doc_ids = tuple(str(d) for d in data["doc_ids"])
    if meta.get("kind") != "embeddings":
        raise ParseError(f"{path} is not an embeddings index file")
    if meta.get("corpus_sha256") != expected_corpus_hash:
        raise StaleIndex(
            f"embeddings {path} were built from a different corpus "
            f"(stored {meta.get('corpus_sha256')!r})"
        )
    if expected_embedder_key is not None and meta.get("embedder_key") != expected_embedder_key:
        raise StaleIndex(
            f"embeddings {path} were produced by {meta.get('embedder_key')!r}, "
            f"expected {expected_embedder_key!r}"
        )
    return SemanticIndex(
        doc_ids=doc_ids,
        matrix=matrix,
        doc_sectors={d: sector_from_code(int(c)) for d, c in meta["doc_sectors"].items()},
        embedder_key=str(meta.get("embedder_key", "")),
    )
