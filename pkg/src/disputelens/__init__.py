"""disputelens: material summaries and precedent search for consumer disputes.

The package splits into three layers. Generation: prompt construction,
provider gateway, and the summarization pipeline. Retrieval: BM25, embedding
cosine, and their fusion, behind fit/predict estimators. Evaluation:
reference-based text metrics and the rubric-prompted judge harness.
"""

__version__ = "0.1.0"

from .models import (
    CaseFile,
    GenerationParams,
    JudgmentRecord,
    MaterialSummary,
    PromptStrategy,
    RankedJudgment,
    SummaryPart,
)
from .sectors import SectorLabel, all_sectors, sector_from_code, sector_from_name

__all__ = [
    "CaseFile",
    "GenerationParams",
    "JudgmentRecord",
    "MaterialSummary",
    "PromptStrategy",
    "RankedJudgment",
    "SectorLabel",
    "SummaryPart",
    "all_sectors",
    "sector_from_code",
    "sector_from_name",
    "__version__",
]
