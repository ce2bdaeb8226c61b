import json
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disputelens.errors import (
    DuplicateId,
    InvalidSector,
    OutOfScale,
    ParseError,
    StaleIndex,
    UnknownMetric,
)
from disputelens.gateway import HashingEmbedder
from disputelens.judge import MetricKind
from disputelens.models import MaterialSummary
from disputelens.retrieval import build_index, build_semantic_index
from disputelens.sectors import sector_from_code
from disputelens.store import (
    corpus_content_hash,
    judgment_to_record,
    load_bm25_index,
    load_case_files,
    load_human_scores,
    load_judgments,
    load_semantic_index,
    load_summaries_jsonl,
    load_summary,
    save_bm25_index,
    save_jsonl,
    save_semantic_index,
    save_summaries_jsonl,
    save_summary,
    summary_from_dict,
    summary_to_dict,
)

from conftest import make_judgment


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_and_read(tmp_path, summary) -> str:
    path = tmp_path / "fresh.json"
    save_summary(path, summary)
    return path.read_text(encoding="utf-8")


JUDGMENT_LINE = json.dumps(
    {
        "id": "j1",
        "title": "Leno Lhouvisier Zinyu vs. The Chairman, Max Life Insurance Company Ltd. and Ors.",
        "citation": "CC/1/2015 2023 SCDRC Nagaland",
        "sector_name": "Insurance",
        "sector_code": 102,
        "brief": "Neither party came to the commission with clean hands; the parties were restored to their pre-contract position.",
    }
)


class TestLoadJudgments:
    def test_valid_file(self, tmp_path):
        path = tmp_path / "j.jsonl"
        write_lines(
            path,
            [
                JUDGMENT_LINE,
                json.dumps({"id": "j2", "sector_code": 110, "brief": "A phone case."}),
            ],
        )
        records = load_judgments(path)
        assert len(records) == 2
        assert records[0].sector.code == 102
        assert records[0].citation == "CC/1/2015 2023 SCDRC Nagaland"

    def test_invalid_sector_code(self, tmp_path):
        path = tmp_path / "j.jsonl"
        write_lines(path, [json.dumps({"id": "x", "sector_code": 300, "brief": "b"})])
        with pytest.raises(InvalidSector) as exc_info:
            load_judgments(path)
        assert exc_info.value.line == 1

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "j.jsonl"
        row = json.dumps({"id": "same", "sector_code": 110, "brief": "b"})
        write_lines(path, [row, row])
        with pytest.raises(DuplicateId):
            load_judgments(path)

    def test_collect_mode_keeps_valid_records(self, tmp_path):
        path = tmp_path / "j.jsonl"
        write_lines(
            path,
            [
                JUDGMENT_LINE,
                "{ broken json",
                json.dumps({"id": "j3", "sector_code": 110, "brief": "ok"}),
                json.dumps({"id": "j4", "sector_code": 777, "brief": "bad sector"}),
            ],
        )
        errors: list = []
        records = load_judgments(path, collect_errors=errors)
        assert [r.id for r in records] == ["j1", "j3"]
        assert len(errors) == 2
        assert errors[0].line == 2
        assert errors[1].line == 4

    def test_missing_brief(self, tmp_path):
        path = tmp_path / "j.jsonl"
        write_lines(path, [json.dumps({"id": "x", "sector_code": 110})])
        with pytest.raises(ParseError) as exc_info:
            load_judgments(path)
        assert "brief" in str(exc_info.value)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "j.jsonl"
        path.write_text("\n" + JUDGMENT_LINE + "\n\n", encoding="utf-8")
        assert len(load_judgments(path)) == 1


class TestLoadCases:
    def test_empty_file_warns(self, tmp_path, caplog):
        path = tmp_path / "cases.jsonl"
        path.write_text("", encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            assert load_case_files(path) == []
        assert "no records" in caplog.text

    def test_missing_complaint_text(self, tmp_path):
        path = tmp_path / "cases.jsonl"
        write_lines(path, [json.dumps({"id": "c1"})])
        with pytest.raises(ParseError):
            load_case_files(path)

    def test_metadata_preserved(self, tmp_path):
        path = tmp_path / "cases.jsonl"
        write_lines(
            path,
            [json.dumps({"id": "c1", "complaint_text": "t", "metadata": {"court": "SCDRC"}})],
        )
        (case,) = load_case_files(path)
        assert dict(case.metadata) == {"court": "SCDRC"}


class TestSummaryRoundTrip:
    def test_fixture_round_trip(self, tmp_path, iphone_summary):
        path = tmp_path / "s.json"
        save_summary(path, iphone_summary, case_id="iphone-001")
        assert load_summary(path) == iphone_summary

    def test_empty_evidence_round_trips(self, tmp_path):
        summary = MaterialSummary(
            overview="o",
            sector=sector_from_code(999),
            issues=("i",),
            evidence_complainant=(),
            evidence_opposite=(),
            reliefs=("r",),
        )
        path = tmp_path / "s.json"
        save_summary(path, summary)
        assert load_summary(path) == summary

    def test_truncated_file(self, tmp_path, iphone_summary):
        path = tmp_path / "s.json"
        save_summary(path, iphone_summary)
        path.write_text(path.read_text(encoding="utf-8")[:40], encoding="utf-8")
        with pytest.raises(ParseError):
            load_summary(path)

    def test_invariant_violations_rejected_at_load(self, tmp_path, iphone_summary):
        import json as json_mod

        path = tmp_path / "s.json"
        save_summary(path, iphone_summary)
        data = json_mod.loads(path.read_text(encoding="utf-8"))
        data["evidence_complainant"][1]["label"] = "CE9"  # gap in the sequence
        path.write_text(json_mod.dumps(data), encoding="utf-8")
        with pytest.raises(ParseError) as exc_info:
            load_summary(path)
        assert "out of sequence" in str(exc_info.value)

        data = json_mod.loads(save_and_read(tmp_path, iphone_summary))
        data["issues"] = []
        path.write_text(json_mod.dumps(data), encoding="utf-8")
        with pytest.raises(ParseError):
            load_summary(path)

    def test_summaries_jsonl_round_trip(self, tmp_path, iphone_summary):
        path = tmp_path / "batch.jsonl"
        rows = [("a", iphone_summary), ("b", iphone_summary)]
        save_summaries_jsonl(path, rows)
        assert load_summaries_jsonl(path) == rows

    word = st.text(alphabet="abcdefghij ", min_size=1, max_size=30).filter(str.strip)

    @given(
        overview=word,
        code=st.sampled_from(list(range(101, 129)) + [999]),
        issues=st.lists(word, min_size=1, max_size=4),
        ce=st.lists(word, min_size=0, max_size=4),
        reliefs=st.lists(word, min_size=1, max_size=3),
    )
    @settings(max_examples=60)
    def test_random_record_round_trip(self, overview, code, issues, ce, reliefs):
        summary = MaterialSummary(
            overview=overview,
            sector=sector_from_code(code),
            issues=tuple(issues),
            evidence_complainant=tuple((f"CE{i}", d) for i, d in enumerate(ce, 1)),
            evidence_opposite=(),
            reliefs=tuple(reliefs),
        )
        assert summary_from_dict(summary_to_dict(summary)) == summary


class TestHumanScores:
    def test_accepts_valid_rows(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text(
            "case_id,metric,score\nc1,SectorRelevance,1\nc1,OverviewAccuracy,4\n",
            encoding="utf-8",
        )
        scores = load_human_scores(path)
        assert scores[("c1", MetricKind.SECTOR_RELEVANCE)] == 1
        assert scores[("c1", MetricKind.OVERVIEW_ACCURACY)] == 4

    def test_out_of_scale(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("case_id,metric,score\nc1,OverviewAccuracy,6\n", encoding="utf-8")
        with pytest.raises(OutOfScale):
            load_human_scores(path)

    def test_unknown_metric(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("case_id,metric,score\nc1,Vibes,3\n", encoding="utf-8")
        with pytest.raises(UnknownMetric):
            load_human_scores(path)

    def test_duplicate_last_wins(self, tmp_path, caplog):
        path = tmp_path / "h.csv"
        path.write_text(
            "case_id,metric,score\nc1,IssuesAccuracy,2\nc1,IssuesAccuracy,5\n",
            encoding="utf-8",
        )
        with caplog.at_level(logging.WARNING):
            scores = load_human_scores(path)
        assert scores[("c1", MetricKind.ISSUES_ACCURACY)] == 5
        assert "duplicate" in caplog.text

    def test_binary_rejects_likert_values(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("case_id,metric,score\nc1,SectorRelevance,3\n", encoding="utf-8")
        with pytest.raises(OutOfScale):
            load_human_scores(path)


class TestIndexPersistence:
    def _corpus(self):
        return [
            make_judgment("a", "apple pie dispute", sector_code=110),
            make_judgment("b", "insurance policy claim", sector_code=102),
        ]

    def test_bm25_round_trip(self, tmp_path):
        corpus = self._corpus()
        index = build_index(corpus)
        content_hash = corpus_content_hash(corpus)
        path = tmp_path / "bm25.idx"
        save_bm25_index(path, index, content_hash)
        loaded = load_bm25_index(path, content_hash)
        assert loaded == index

    def test_bm25_stale_hash_rejected(self, tmp_path):
        corpus = self._corpus()
        index = build_index(corpus)
        path = tmp_path / "bm25.idx"
        save_bm25_index(path, index, corpus_content_hash(corpus))
        changed = corpus + [make_judgment("c", "new judgment")]
        with pytest.raises(StaleIndex):
            load_bm25_index(path, corpus_content_hash(changed))

    def test_semantic_round_trip(self, tmp_path):
        corpus = self._corpus()
        embedder = HashingEmbedder(dim=16)
        index = build_semantic_index(corpus, embedder)
        content_hash = corpus_content_hash(corpus)
        path = tmp_path / "embeddings.bin"
        save_semantic_index(path, index, content_hash)
        loaded = load_semantic_index(path, content_hash, embedder.cache_key())
        assert loaded.doc_ids == index.doc_ids
        assert loaded.embedder_key == index.embedder_key
        assert (loaded.matrix == index.matrix).all()

    def test_semantic_embedder_mismatch(self, tmp_path):
        corpus = self._corpus()
        index = build_semantic_index(corpus, HashingEmbedder(dim=16))
        content_hash = corpus_content_hash(corpus)
        path = tmp_path / "embeddings.bin"
        save_semantic_index(path, index, content_hash)
        with pytest.raises(StaleIndex):
            load_semantic_index(path, content_hash, "hash-bow:64")

    def test_content_hash_order_independent(self):
        corpus = self._corpus()
        assert corpus_content_hash(corpus) == corpus_content_hash(list(reversed(corpus)))

    def test_save_jsonl_atomic_replaces(self, tmp_path):
        path = tmp_path / "out.jsonl"
        save_jsonl(path, [judgment_to_record(j) for j in self._corpus()])
        first = path.read_text(encoding="utf-8")
        save_jsonl(path, [judgment_to_record(self._corpus()[0])])
        second = path.read_text(encoding="utf-8")
        assert len(second) < len(first)
        assert not list(tmp_path.glob(".out.jsonl.*"))  # no temp litter
