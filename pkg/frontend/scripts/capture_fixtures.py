#!/usr/bin/env python3
"""Capture real API responses from the mock-backed service into test fixtures.

The vitest suite replays these JSON bodies through an injected fetch, so UI
tests assert against genuine service output (including the lexical-only
ordering behind the weight-slider test) without running a server.

Run from the repository root after installing the package:

    python3 frontend/scripts/capture_fixtures.py
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from conftest import load_fixture_json, make_judgment  # noqa: E402

from disputelens.config import AppConfig  # noqa: E402
from disputelens.gateway import HashingEmbedder, MockChatProvider  # noqa: E402
from disputelens.judge import ALL_KINDS, Scale  # noqa: E402
from disputelens.models import CaseFile  # noqa: E402
from disputelens.service import create_app  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def judgment_corpus():
    return [
        make_judgment(
            "prec-frivolous",
            "frivolous frivolous frivolous complaints complaints compensation "
            "compensation aggrieved",
            110,
            title="Frivolous complaints after replacement",
        ),
        make_judgment(
            "prec-broadmatch",
            "complainant purchased iphone authorised seller apple defective service "
            "centre replacement warranty complaint compensation price product defect",
            110,
            title="Defective handset replacement dispute",
        ),
        make_judgment(
            "prec-warranty",
            "warranty terms exclude defects identified after replacement of the product",
            110,
            title="Warranty exclusion on replaced goods",
        ),
        make_judgment(
            "prec-refund",
            "refund of price with interest ordered for defective mobile phone "
            "returned to seller",
            110,
            title="Refund with interest for defective mobile",
        ),
        make_judgment(
            "prec-service",
            "service centre failed to repair handset repeatedly deficiency in "
            "service established",
            110,
            title="Repeated repair failure as deficiency",
        ),
        make_judgment(
            "prec-laptop",
            "laptop screen flicker not proved no deficiency complaint dismissed",
            110,
            title="Laptop defect not proved",
        ),
        make_judgment(
            "ins-1",
            "insurance policy claim repudiated for suppression of material facts",
            102,
            title="Claim repudiation",
        ),
        make_judgment(
            "ins-2",
            "surrender value of policy wrongly calculated by insurer",
            102,
            title="Surrender value dispute",
        ),
    ]


def judge_script():
    # mixed verdicts so the dashboard shows non-trivial bars/chips, plus one
    # permanently failing metric for the failure counter
    script = {}
    likert = {"pair-a": 5, "pair-b": 4, "pair-c": 3}
    binary = {"pair-a": "Yes", "pair-b": "No", "pair-c": "Yes"}
    for kind in ALL_KINDS:
        for pid in ("pair-a", "pair-b", "pair-c"):
            if kind.scale is Scale.LIKERT:
                script[f"judge:{kind.value}:{pid}"] = (
                    f"The generated summary tracks the reference closely for {pid}. "
                    f"<score>{likert[pid]}</score>"
                )
            else:
                script[f"judge:{kind.value}:{pid}"] = (
                    f"Checked the section against the reference for {pid}. "
                    f"<score>{binary[pid]}</score>"
                )
    script["judge:EvidenceAccuracy:pair-c"] = "no verdict tag emitted"
    return script


def main() -> None:
    case_data = load_fixture_json("iphone_case.json")
    case = CaseFile(
        id=case_data["id"],
        complaint_text=case_data["complaint_text"],
        written_statement_text=case_data["written_statement_text"],
        metadata=case_data["metadata"],
    )
    provider = MockChatProvider(
        {**load_fixture_json("iphone_partwise_script.json"), **judge_script()}
    )
    app = create_app(
        AppConfig(),
        provider=provider,
        embedder=HashingEmbedder(dim=64),
        judgments=judgment_corpus(),
        cases=[case],
    )
    client = TestClient(app)
    OUT.mkdir(parents=True, exist_ok=True)

    captured: dict[str, dict] = {}

    def capture(name: str, response) -> dict:
        assert response.status_code in (200, 404, 422), (name, response.status_code)
        body = response.json()
        (OUT / f"{name}.json").write_text(
            json.dumps(body, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        captured[name] = body
        print(f"captured {name}.json")
        return body

    capture("sectors", client.get("/v1/sectors"))
    capture(
        "summarize_iphone",
        client.post("/v1/summarize", json={"case_id": "iphone-001", "strategy": "partwise-cot"}),
    )
    for name, weight in (
        ("similar_default", 0.5),
        ("similar_lexical", 1.0),
        ("similar_semantic", 0.0),
    ):
        capture(
            name,
            client.post("/v1/similar", json={"case_id": "iphone-001", "weight": weight, "k": 5}),
        )
    capture(
        "similar_empty_sector",
        client.post("/v1/similar", json={"case_id": "iphone-001", "sector": 999}),
    )
    capture("similar_bad_sector", client.post("/v1/similar", json={"overview": "x", "sector": 300}))
    capture("judgment_prec_warranty", client.get("/v1/judgments/prec-warranty"))

    summary_record = captured["summarize_iphone"]["summary"]
    pairs = [
        {"original": summary_record, "generated": summary_record, "case_id": pid}
        for pid in ("pair-a", "pair-b", "pair-c")
    ]
    capture("report", client.post("/v1/evaluate", json={"pairs": pairs}))

    # the weight-slider test depends on the orderings genuinely differing
    def order(name: str) -> list[str]:
        return [r["judgment_id"] for r in captured[name]["results"]]

    assert order("similar_lexical") != order("similar_default"), "need a visible reorder"
    assert order("similar_semantic") != order("similar_lexical")
    assert captured["similar_empty_sector"]["results"] == []
    assert captured["similar_empty_sector"]["warning"]
    assert captured["report"]["failures"]["EvidenceAccuracy"] == 1
    print("capture assertions passed")


if __name__ == "__main__":
    main()
