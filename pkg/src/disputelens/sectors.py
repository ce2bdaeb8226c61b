"""The closed consumer-protection sector taxonomy and lookup helpers.

29 entries: codes 101..128 plus the catch-all 999. The table is versioned;
bump ``TAXONOMY_VERSION`` if an entry ever changes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import UnknownSectorCode, UnknownSectorName

TAXONOMY_VERSION = 1

_ENTRIES: tuple[tuple[str, int], ...] = (
    ("Banking and Financial Services", 101),
    ("Insurance", 102),
    ("Retail - Clothing", 103),
    ("Retail - Electronics", 104),
    ("Retail - Home & Furniture", 105),
    ("Retail - Groceries and FMCG", 106),
    ("Retail - Beauty & Personal Care", 107),
    ("E-commerce", 108),
    ("Telecommunications", 109),
    ("Consumer Electronics", 110),
    ("Healthcare and Pharmaceuticals", 111),
    ("Medical Services (including Negligence)", 112),
    ("Transport - Airlines", 113),
    ("Transport - Railways", 114),
    ("Real Estate", 115),
    ("Utilities (Electricity, Water)", 116),
    ("Automobiles", 117),
    ("Food Services", 118),
    ("Travel and Tourism", 119),
    ("Education", 120),
    ("Entertainment and Media", 121),
    ("Legal Services", 122),
    ("Home Services", 123),
    ("Sports and Recreation", 124),
    ("Technology Services", 125),
    ("Legal Metrology", 126),
    ("Petroleum", 127),
    ("Postal and Courier", 128),
    ("Others", 999),
)


@dataclass(frozen=True)
class SectorLabel:
    name: str
    code: int


TAXONOMY: tuple[SectorLabel, ...] = tuple(SectorLabel(n, c) for n, c in _ENTRIES)

_BY_CODE = {s.code: s for s in TAXONOMY}


def _normalize(name: str) -> str:
    return re.sub(r"\s+", " ", name.strip()).lower()


def _strip_parenthetical(name: str) -> str:
    return re.sub(r"\s*\([^)]*\)", "", name).strip()


def _build_name_table() -> dict[str, SectorLabel]:
    table: dict[str, SectorLabel] = {}
    for s in TAXONOMY:
        table[_normalize(s.name)] = s
        # LLM outputs frequently drop the parenthetical qualifier, so
        # "Medical Services" and "Utilities" resolve to their full entries.
        bare = _normalize(_strip_parenthetical(s.name))
        if bare and bare not in table:
            table[bare] = s
    return table


_BY_NAME = _build_name_table()


def all_sectors() -> tuple[SectorLabel, ...]:
    return TAXONOMY


def sector_from_code(code: int) -> SectorLabel:
    try:
        return _BY_CODE[code]
    except KeyError:
        raise UnknownSectorCode(f"unknown sector code {code!r}") from None


def sector_from_name(name: str) -> SectorLabel:
    """Case-insensitive, whitespace-normalized lookup."""
    key = _normalize(name)
    sector = _BY_NAME.get(key) or _BY_NAME.get(_normalize(_strip_parenthetical(name)))
    if sector is None:
        raise UnknownSectorName(f"unknown sector name {name!r}")
    return sector


def find_sector_suffix(text: str) -> SectorLabel | None:
    """Longest taxonomy name that ``text`` ends with, if any.

    Tolerates prose prefixes like "The sector is Insurance".
    """
    key = _normalize(text)
    best: SectorLabel | None = None
    best_len = 0
    for alias, sector in _BY_NAME.items():
        if key == alias or key.endswith(" " + alias):
            if len(alias) > best_len:
                best, best_len = sector, len(alias)
    return best


def taxonomy_json() -> str:
    """The taxonomy as a JSON array of ``{name, code}`` objects."""
    return json.dumps(
        [{"name": s.name, "code": s.code} for s in TAXONOMY],
        ensure_ascii=False,
        indent=2,
    )
