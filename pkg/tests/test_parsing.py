import logging
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disputelens.errors import (
    EmptyListError,
    EvidenceParseError,
    MissingPartError,
    SectorParseError,
    UnknownSectorCode,
)
from disputelens.models import MaterialSummary, SummaryPart
from disputelens.parsing import (
    parse_evidence_list,
    parse_numbered_list,
    parse_overview,
    parse_sector_line,
    parse_whole_summary,
    render_summary_text,
)
from disputelens.sectors import sector_from_code

FIXTURES = Path(__file__).parent / "fixtures"


class TestSectorLine:
    def test_canonical_line(self):
        assert parse_sector_line("Sector:- Consumer Electronics, 110").code == 110

    def test_prose_tolerant(self):
        line = "The sector is Insurance, 102 because the dispute concerns a policy."
        assert parse_sector_line(line).code == 102

    def test_name_only_fallback(self):
        assert parse_sector_line("Sector:- Insurance").code == 102

    def test_code_wins_over_name(self, caplog):
        with caplog.at_level(logging.WARNING):
            sector = parse_sector_line("Sector:- Insurance, 110")
        assert sector.code == 110
        assert "conflict" in caplog.text

    def test_unknown_code(self):
        with pytest.raises(UnknownSectorCode):
            parse_sector_line("Sector:- Cryptocurrency, 300")

    def test_invalid_code_with_valid_name_recovers(self, caplog):
        with caplog.at_level(logging.WARNING):
            sector = parse_sector_line("Sector:- Insurance, 300")
        assert sector.code == 102

    def test_no_parseable_line(self):
        with pytest.raises(SectorParseError):
            parse_sector_line("I could not determine anything useful.")

    def test_skips_preamble_lines(self):
        text = "Let me think about this.\nSector:- Automobiles, 117"
        assert parse_sector_line(text).code == 117

    def test_ampersand_heading_with_inline_value(self):
        assert parse_sector_line("Sector & Code: Consumer Electronics, 110").code == 110


class TestEvidenceList:
    def test_complainant_colon_labels(self):
        out = parse_evidence_list("CE1: ID proof\nCE2: Purchase bill", "complainant")
        assert out == [("CE1", "ID proof"), ("CE2", "Purchase bill")]

    def test_dot_labels(self):
        out = parse_evidence_list("OPE1. warranty copy\nOPE2. affidavit", "opposite")
        assert out == [("OPE1", "warranty copy"), ("OPE2", "affidavit")]

    def test_nil_yields_empty(self):
        assert parse_evidence_list("Nil", "complainant") == []
        assert parse_evidence_list("nil", "opposite") == []
        assert parse_evidence_list("The evidence list says NIL here.", "opposite") == []

    def test_wrong_label_family(self):
        with pytest.raises(EvidenceParseError):
            parse_evidence_list("OPE1. warranty copy", "complainant")

    def test_gap_renumbering(self):
        out = parse_evidence_list("CE2: bill\nCE7: photo\nCE9: report", "complainant")
        assert [label for label, _ in out] == ["CE1", "CE2", "CE3"]
        assert [desc for _, desc in out] == ["bill", "photo", "report"]

    def test_heading_line_ignored(self):
        text = "Evidence presented by the complainant:-\nCE1. receipt"
        assert parse_evidence_list(text, "complainant") == [("CE1", "receipt")]

    def test_no_labels_no_nil(self):
        with pytest.raises(EvidenceParseError):
            parse_evidence_list("some prose about documents", "opposite")

    @given(st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=10, unique=True))
    def test_labels_always_consecutive(self, numbers):
        text = "\n".join(f"CE{n}: item number {n}" for n in numbers)
        out = parse_evidence_list(text, "complainant")
        assert [label for label, _ in out] == [f"CE{i}" for i in range(1, len(numbers) + 1)]


class TestNumberedList:
    def test_dot_markers(self):
        assert parse_numbered_list("1. Whether X?\n2. Whether Y?") == [
            "Whether X?",
            "Whether Y?",
        ]

    def test_paren_markers(self):
        assert parse_numbered_list("1) first\n2) second") == ["first", "second"]

    def test_dash_markers(self):
        out = parse_numbered_list(
            "- Refund of Rs. 18,740/- with interest\n- Compensation of Rs. 30,000/-"
        )
        assert len(out) == 2
        assert out[0].startswith("Refund")

    def test_empty_text(self):
        with pytest.raises(EmptyListError):
            parse_numbered_list("")

    def test_prose_only(self):
        with pytest.raises(EmptyListError):
            parse_numbered_list("no list markers anywhere in this paragraph")

    def test_prose_mixed_with_list_keeps_only_items(self):
        text = "Here are the issues I found:\n1. first issue\nas you can see\n2. second issue"
        assert parse_numbered_list(text) == ["first issue", "second issue"]


class TestOverview:
    def test_prefix_stripped(self):
        assert parse_overview("Overview: The phone was defective.") == "The phone was defective."

    def test_bare_text(self):
        assert parse_overview("The phone was defective.") == "The phone was defective."

    def test_empty(self):
        from disputelens.errors import OverviewParseError

        with pytest.raises(OverviewParseError):
            parse_overview("Overview: ")


class TestWholeSummary:
    def test_fixture_text(self, iphone_summary):
        text = (FIXTURES / "iphone_summary.txt").read_text(encoding="utf-8")
        parsed = parse_whole_summary(text)
        assert parsed == iphone_summary
        assert parsed.sector.code == 110
        assert len(parsed.issues) == 4
        assert [l for l, _ in parsed.evidence_complainant] == ["CE1", "CE2", "CE3", "CE4", "CE5"]
        assert [l for l, _ in parsed.evidence_opposite] == ["OPE1", "OPE2"]
        assert len(parsed.reliefs) == 2

    def test_uppercase_heading_variants(self):
        text = "\n".join(
            [
                "Overview:",
                "A defective phone dispute.",
                "SECTOR AND SECTOR CODE:",
                "Consumer Electronics, 110",
                "ISSUES:",
                "1. Whether there was a deficiency in service?",
                "EVIDENCE PRESENTED BY THE COMPLAINANT:",
                "CE1: bill",
                "EVIDENCE PRESENTED BY THE OPPOSITE PARTY:",
                "Nil",
                "RELIEF:",
                "1. Refund of the price.",
            ]
        )
        parsed = parse_whole_summary(text)
        assert parsed.sector.code == 110
        assert parsed.evidence_opposite == ()
        assert parsed.reliefs == ("Refund of the price.",)

    def test_missing_reliefs_heading(self):
        text = "\n".join(
            [
                "Overview:",
                "A dispute.",
                "Sector & Code: Insurance, 102",
                "Issues:",
                "1. An issue?",
                "Evidence - Complainant:",
                "Nil",
                "Evidence - Opposite Party:",
                "Nil",
            ]
        )
        with pytest.raises(MissingPartError) as exc_info:
            parse_whole_summary(text)
        assert exc_info.value.parts == (SummaryPart.RELIEFS,)

    def test_missing_everything_lists_all_parts(self):
        with pytest.raises(MissingPartError) as exc_info:
            parse_whole_summary("just some text with no headings")
        assert len(exc_info.value.parts) == 6

    def test_nil_evidence(self):
        text = "\n".join(
            [
                "Overview: A dispute about a fridge.",
                "Sector & Code: Consumer Electronics, 110",
                "Issues:",
                "1. Whether the fridge was defective?",
                "Evidence presented by the complainant: Nil",
                "Evidence presented by the opposite party: Nil",
                "Reliefs:",
                "1. Replacement.",
            ]
        )
        parsed = parse_whole_summary(text)
        assert parsed.evidence_complainant == ()
        assert parsed.evidence_opposite == ()


def _summary_strategy():
    # plain words keep generated text from colliding with heading detection,
    # which is a documented tolerance boundary of the text format
    word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=10)
    phrase = st.lists(word, min_size=1, max_size=8).map(" ".join)
    evidence = st.lists(phrase, min_size=0, max_size=4)
    return st.builds(
        lambda overview, code, issues, ce, ope, reliefs: MaterialSummary(
            overview=overview,
            sector=sector_from_code(code),
            issues=tuple(issues),
            evidence_complainant=tuple((f"CE{i}", d) for i, d in enumerate(ce, 1)),
            evidence_opposite=tuple((f"OPE{i}", d) for i, d in enumerate(ope, 1)),
            reliefs=tuple(reliefs),
        ),
        overview=phrase,
        code=st.sampled_from(list(range(101, 129)) + [999]),
        issues=st.lists(phrase, min_size=1, max_size=5),
        ce=evidence,
        ope=evidence,
        reliefs=st.lists(phrase, min_size=1, max_size=4),
    )


@given(_summary_strategy())
@settings(max_examples=80)
def test_render_parse_round_trip(summary):
    assert parse_whole_summary(render_summary_text(summary)) == summary


def test_render_fixture_round_trip(iphone_summary):
    rendered = render_summary_text(iphone_summary)
    assert parse_whole_summary(rendered) == iphone_summary
