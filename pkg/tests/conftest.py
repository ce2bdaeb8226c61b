import json
from pathlib import Path

import pytest

from disputelens.gateway import HashingEmbedder, MockChatProvider
from disputelens.models import CaseFile, JudgmentRecord
from disputelens.sectors import sector_from_code
from disputelens.store import summary_from_dict

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_json(name: str):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def iphone_case() -> CaseFile:
    data = load_fixture_json("iphone_case.json")
    return CaseFile(
        id=data["id"],
        complaint_text=data["complaint_text"],
        written_statement_text=data["written_statement_text"],
        metadata=data["metadata"],
    )


@pytest.fixture
def iphone_summary():
    return summary_from_dict(load_fixture_json("iphone_summary.json"))


@pytest.fixture
def partwise_script() -> dict:
    return load_fixture_json("iphone_partwise_script.json")


@pytest.fixture
def single_script() -> dict:
    return load_fixture_json("iphone_single_script.json")


@pytest.fixture
def partwise_provider(partwise_script) -> MockChatProvider:
    return MockChatProvider(partwise_script)


@pytest.fixture
def hash_embedder() -> HashingEmbedder:
    return HashingEmbedder(dim=64)


def make_judgment(
    doc_id: str,
    brief: str,
    sector_code: int = 110,
    title: str = "",
    citation: str = "",
) -> JudgmentRecord:
    return JudgmentRecord(
        id=doc_id,
        title=title or f"Judgment {doc_id}",
        citation=citation or f"CC/{doc_id}/2020",
        sector=sector_from_code(sector_code),
        brief=brief,
    )


@pytest.fixture
def fruit_corpus() -> list[JudgmentRecord]:
    """The 3-doc corpus behind the hand-computed BM25 examples."""
    return [
        make_judgment("d1", "red apple"),
        make_judgment("d2", "green apple pie"),
        make_judgment("d3", "banana"),
    ]
