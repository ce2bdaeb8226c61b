"""Sector-filtered similar-judgment retrieval.

Three rankers over judgment briefs: Okapi BM25 (lexical), embedding cosine
(semantic), and a weighted fusion of the two after per-family min-max
normalization. Estimator classes wrap the pure functions in a fit/predict
surface so the retrievers compose with sklearn tooling (``get_params``,
cloning, pipelines).
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import DuplicateDocId, UnknownDocId, ZeroVector, DimensionMismatch
from .gateway import Embedder, EmbeddingVector, HashingEmbedder
from .models import JudgmentRecord, MaterialSummary, RankedJudgment
from .sectors import SectorLabel

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs. No stemming, no stopwords."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0 <= self.b <= 1:
            raise ValueError("b must be within [0, 1]")


@dataclass(frozen=True)
class Bm25Index:
    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_lengths: dict[str, int]
    avgdl: float
    n_docs: int
    doc_sectors: dict[str, SectorLabel]
    params: Bm25Params


def _doc_text(doc: JudgmentRecord, include_full_text: bool) -> str:
    if include_full_text and doc.full_text:
        return f"{doc.brief}\n{doc.full_text}"
    return doc.brief


def build_index(
    docs: Sequence[JudgmentRecord],
    params: Bm25Params = Bm25Params(),
    include_full_text: bool = False,
) -> Bm25Index:
    """Build an inverted index over judgment briefs.

    Deterministic for a fixed input order; duplicate ids are rejected.
    """
    if not docs:
        raise ValueError("cannot build an index over zero documents")
    doc_lengths: dict[str, int] = {}
    doc_sectors: dict[str, SectorLabel] = {}
    tf: dict[str, dict[str, int]] = {}
    for doc in docs:
        if doc.id in doc_lengths:
            raise DuplicateDocId(f"duplicate judgment id {doc.id!r}")
        terms = tokenize(_doc_text(doc, include_full_text))
        doc_lengths[doc.id] = len(terms)
        doc_sectors[doc.id] = doc.sector
        for term in terms:
            tf.setdefault(term, {})
            tf[term][doc.id] = tf[term].get(doc.id, 0) + 1
    postings = {
        term: tuple(sorted(counts.items())) for term, counts in sorted(tf.items())
    }
    n = len(doc_lengths)
    avgdl = sum(doc_lengths.values()) / n
    return Bm25Index(
        postings=postings,
        doc_lengths=doc_lengths,
        avgdl=avgdl,
        n_docs=n,
        doc_sectors=doc_sectors,
        params=params,
    )


def _idf(index: Bm25Index, term: str) -> float:
    n_q = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.n_docs - n_q + 0.5) / (n_q + 0.5))


def bm25_score(index: Bm25Index, query_terms: Sequence[str], doc_id: str) -> float:
    """Okapi BM25 with the +1-inside-log IDF (always non-negative).

    Query terms are scored per occurrence, so a repeated query term
    contributes once per repetition.
    """
    if doc_id not in index.doc_lengths:
        raise UnknownDocId(f"doc id {doc_id!r} is not in the index")
    k1, b = index.params.k1, index.params.b
    dl = index.doc_lengths[doc_id]
    norm = k1 * (1.0 - b + b * dl / index.avgdl)
    score = 0.0
    for term in query_terms:
        freq = 0
        for candidate, tf in index.postings.get(term, ()):
            if candidate == doc_id:
                freq = tf
                break
        if freq == 0:
            continue
        score += _idf(index, term) * (freq * (k1 + 1.0)) / (freq + norm)
    return score


def _sector_docs(index: Bm25Index, sector: SectorLabel | None) -> list[str]:
    if sector is None:
        return list(index.doc_lengths)
    return [d for d, s in index.doc_sectors.items() if s.code == sector.code]


def lexical_topk(
    index: Bm25Index,
    query_text: str,
    k: int,
    sector: SectorLabel | None = None,
) -> list[tuple[str, float]]:
    """Top-k BM25 matches; zero-score docs never appear.

    Sorted by score descending, ties broken by ascending doc id. May return
    fewer than ``k`` rows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tokenize(query_text)
    allowed = set(_sector_docs(index, sector))
    candidates = set()
    for term in terms:
        candidates.update(d for d, _ in index.postings.get(term, ()))
    candidates &= allowed
    scored = [(d, bm25_score(index, terms, d)) for d in sorted(candidates)]
    scored = [(d, s) for d, s in scored if s > 0.0]
    scored.sort(key=lambda row: (-row[1], row[0]))
    return scored[:k]


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise DimensionMismatch(f"cosine over dims {a.dim} and {b.dim}")
    av = np.asarray(a.values)
    bv = np.asarray(b.values)
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for all-zero vectors")
    return float(np.dot(av, bv) / (na * nb))


@dataclass(frozen=True)
class SemanticIndex:
    doc_ids: tuple[str, ...]
    matrix: np.ndarray  # row-normalized, one row per doc
    doc_sectors: dict[str, SectorLabel]
    embedder_key: str

    def row(self, doc_id: str) -> np.ndarray:
        try:
            return self.matrix[self.doc_ids.index(doc_id)]
        except ValueError:
            raise UnknownDocId(f"doc id {doc_id!r} is not in the semantic index") from None


def build_semantic_index(
    docs: Sequence[JudgmentRecord],
    embedder: Embedder,
    include_full_text: bool = False,
) -> SemanticIndex:
    if not docs:
        raise ValueError("cannot build a semantic index over zero documents")
    ids = [d.id for d in docs]
    if len(set(ids)) != len(ids):
        raise DuplicateDocId("duplicate judgment ids in semantic index input")
    vectors = embedder.embed([_doc_text(d, include_full_text) for d in docs])
    matrix = np.asarray([v.values for v in vectors], dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ZeroVector(f"brief of judgment {ids[int(zero_rows[0])]!r} embeds to zero")
    matrix = matrix / norms[:, None]
    return SemanticIndex(
        doc_ids=tuple(ids),
        matrix=matrix,
        doc_sectors={d.id: d.sector for d in docs},
        embedder_key=embedder.cache_key(),
    )


def _embed_query(embedder: Embedder, query_text: str) -> np.ndarray:
    vec = np.asarray(embedder.embed([query_text])[0].values, dtype=np.float64)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ZeroVector("query embeds to the zero vector")
    return vec / norm


def semantic_topk(
    index: SemanticIndex,
    embedder: Embedder,
    query_text: str,
    k: int,
    sector: SectorLabel | None = None,
) -> list[tuple[str, float]]:
    """Top-k cosine matches, same ordering and tie rules as lexical_topk."""
    if k < 1:
        raise ValueError("k must be >= 1")
    query = _embed_query(embedder, query_text)
    if query.shape[0] != index.matrix.shape[1]:
        raise DimensionMismatch(
            f"query dim {query.shape[0]} vs index dim {index.matrix.shape[1]}"
        )
    scores = index.matrix @ query
    rows = [
        (doc_id, float(scores[i]))
        for i, doc_id in enumerate(index.doc_ids)
        if sector is None or index.doc_sectors[doc_id].code == sector.code
    ]
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows[:k]


@dataclass(frozen=True)
class HybridConfig:
    lexical_weight: float = 0.5
    top_k: int = 5

    def __post_init__(self):
        if not 0 <= self.lexical_weight <= 1:
            raise ValueError("lexical_weight must be within [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


def _minmax(raw: dict[str, float]) -> dict[str, float]:
    if not raw:
        return {}
    lo = min(raw.values())
    hi = max(raw.values())
    if hi == lo:
        # no spread: the family carries no ranking signal
        return {d: 0.5 for d in raw}
    return {d: (v - lo) / (hi - lo) for d, v in raw.items()}


def hybrid_topk(
    bm25_index: Bm25Index,
    semantic_index: SemanticIndex,
    embedder: Embedder,
    query_text: str,
    cfg: HybridConfig = HybridConfig(),
    sector: SectorLabel | None = None,
) -> list[RankedJudgment]:
    """Fuse lexical and semantic scores over the union of both candidate pools.

    Both scores are computed directly for every pooled doc (BM25 is 0 for
    docs sharing no query term). Each family is min-max normalized to [0, 1]
    (a spread-less family collapses to 0.5), then fused as
    ``w * lexical + (1 - w) * semantic``. Docs a family's index does not
    cover at all fall back to that family's raw minimum before normalization.
    """
    terms = tokenize(query_text)
    query_vec = _embed_query(embedder, query_text)
    lex_pool = set(_sector_docs(bm25_index, sector))
    sem_pool = {
        d
        for d in semantic_index.doc_ids
        if sector is None or semantic_index.doc_sectors[d].code == sector.code
    }
    pool = sorted(lex_pool | sem_pool)
    if not pool:
        return []

    lex_raw = {d: bm25_score(bm25_index, terms, d) for d in pool if d in lex_pool}
    sem_scores = semantic_index.matrix @ query_vec
    sem_by_id = dict(zip(semantic_index.doc_ids, sem_scores.tolist()))
    sem_raw = {d: float(sem_by_id[d]) for d in pool if d in sem_pool}

    # a doc outside one family's index inherits that family's raw minimum
    if lex_raw:
        lex_floor = min(lex_raw.values())
        lex_raw.update({d: lex_floor for d in pool if d not in lex_raw})
    else:
        lex_raw = {d: 0.0 for d in pool}
    if sem_raw:
        sem_floor = min(sem_raw.values())
        sem_raw.update({d: sem_floor for d in pool if d not in sem_raw})
    else:
        sem_raw = {d: 0.0 for d in pool}

    lex_norm = _minmax(lex_raw)
    sem_norm = _minmax(sem_raw)
    w = cfg.lexical_weight
    fused = {d: w * lex_norm[d] + (1.0 - w) * sem_norm[d] for d in pool}
    ordered = sorted(pool, key=lambda d: (-fused[d], d))[: cfg.top_k]
    return [
        RankedJudgment(
            judgment_id=d,
            lexical_score=lex_raw[d],
            semantic_score=min(1.0, max(-1.0, sem_raw[d])),
            fused_score=min(1.0, max(0.0, fused[d])),
            rank=i,
        )
        for i, d in enumerate(ordered, start=1)
    ]


# ---------------------------------------------------------------------------
# estimator layer
# ---------------------------------------------------------------------------


def _check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() with the "
            "judgment corpus first"
        )


def _check_judgments(judgments: Sequence[JudgmentRecord]) -> list[JudgmentRecord]:
    docs = list(judgments)
    if not docs:
        raise ValueError("fit() requires at least one judgment")
    for doc in docs:
        if not isinstance(doc, JudgmentRecord):
            raise TypeError(f"expected JudgmentRecord, got {type(doc).__name__}")
    return docs


class Bm25Retriever(BaseEstimator):
    """Okapi BM25 ranker over judgment briefs."""

    def __init__(self, k1: float = 1.2, b: float = 0.75, include_full_text: bool = False):
        self.k1 = k1
        self.b = b
        self.include_full_text = include_full_text

    def fit(self, judgments: Sequence[JudgmentRecord], y=None):
        docs = _check_judgments(judgments)
        self.index_ = build_index(
            docs, Bm25Params(self.k1, self.b), self.include_full_text
        )
        return self

    def topk(self, query_text: str, k: int = 5, sector: SectorLabel | None = None):
        _check_fitted(self, "index_")
        return lexical_topk(self.index_, query_text, k, sector)


class SemanticRetriever(BaseEstimator):
    """Embedding-cosine ranker over judgment briefs."""

    def __init__(self, embedder: Embedder | None = None, include_full_text: bool = False):
        self.embedder = embedder
        self.include_full_text = include_full_text

    def _embedder(self) -> Embedder:
        return self.embedder if self.embedder is not None else HashingEmbedder()

    def fit(self, judgments: Sequence[JudgmentRecord], y=None):
        docs = _check_judgments(judgments)
        self.index_ = build_semantic_index(docs, self._embedder(), self.include_full_text)
        return self

    def topk(self, query_text: str, k: int = 5, sector: SectorLabel | None = None):
        _check_fitted(self, "index_")
        return semantic_topk(self.index_, self._embedder(), query_text, k, sector)


class HybridRetriever(BaseEstimator):
    """Fused lexical+semantic ranker; the default retrieval engine.

    ``predict`` maps summaries to ranked judgment lists, filtering each query
    by the summary's own sector. ``topk`` is the lower-level query method
    with explicit overrides.
    """

    def __init__(
        self,
        lexical_weight: float = 0.5,
        top_k: int = 5,
        k1: float = 1.2,
        b: float = 0.75,
        embedder: Embedder | None = None,
        include_full_text: bool = False,
    ):
        self.lexical_weight = lexical_weight
        self.top_k = top_k
        self.k1 = k1
        self.b = b
        self.embedder = embedder
        self.include_full_text = include_full_text

    def _embedder(self) -> Embedder:
        return self.embedder if self.embedder is not None else HashingEmbedder()

    def fit(self, judgments: Sequence[JudgmentRecord], y=None):
        docs = _check_judgments(judgments)
        params = Bm25Params(self.k1, self.b)
        self.bm25_index_ = build_index(docs, params, self.include_full_text)
        self.semantic_index_ = build_semantic_index(
            docs, self._embedder(), self.include_full_text
        )
        return self

    def topk(
        self,
        query_text: str,
        sector: SectorLabel | None = None,
        k: int | None = None,
        weight: float | None = None,
    ) -> list[RankedJudgment]:
        _check_fitted(self, "bm25_index_")
        cfg = HybridConfig(
            lexical_weight=self.lexical_weight if weight is None else weight,
            top_k=self.top_k if k is None else k,
        )
        return hybrid_topk(
            self.bm25_index_,
            self.semantic_index_,
            self._embedder(),
            query_text,
            cfg,
            sector,
        )

    def predict(self, summaries: Sequence[MaterialSummary]) -> list[list[RankedJudgment]]:
        return [predict_similar(s, self) for s in summaries]

    def sector_size(self, sector: SectorLabel) -> int:
        _check_fitted(self, "bm25_index_")
        return len(_sector_docs(self.bm25_index_, sector))


def predict_similar(
    summary: MaterialSummary,
    retriever: HybridRetriever,
    k: int | None = None,
    weight: float | None = None,
    sector_override: SectorLabel | None = None,
) -> list[RankedJudgment]:
    """Rank precedents for a summary: its overview queries, its sector filters.

    ``sector_override`` swaps in a gold sector label for experiments. An empty
    sector yields an empty list plus a logged warning rather than an error.
    """
    sector = sector_override if sector_override is not None else summary.sector
    if retriever.sector_size(sector) == 0:
        logger.warning(
            "no judgments in sector %s (%d); returning no precedents",
            sector.name,
            sector.code,
        )
        return []
    return retriever.topk(summary.overview, sector=sector, k=k, weight=weight)
