"""Reference-based text metrics and rank statistics.

All functions are pure and operate on the same tokenization as retrieval.
ROUGE/BLEU values are single-pair (sentence-level); run-level numbers are
means of per-pair values, assembled by the evaluation harness.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConstantInput, EmptyRetrieval, LengthMismatch
from .retrieval import tokenize


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


_ZERO = PRF(0.0, 0.0, 0.0)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _prf(overlap: float, n_cand: int, n_ref: int) -> PRF:
    if n_cand == 0 or n_ref == 0:
        return _ZERO
    p = overlap / n_cand
    r = overlap / n_ref
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return PRF(p, r, f1)


def rouge_n(candidate: str, reference: str, n: int) -> PRF:
    """N-gram overlap with clipped counts; n is 1 or 2."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    cand = _ngrams(tokenize(candidate), n)
    ref = _ngrams(tokenize(reference), n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            curr.append(prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> PRF:
    """Longest-common-subsequence overlap over token sequences."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    lcs = _lcs_length(cand, ref)
    return _prf(lcs, len(cand), len(ref))


def bleu1(candidate: str, reference: str) -> float:
    """Sentence-level BLEU-1: clipped unigram precision times brevity penalty.

    No smoothing; an empty candidate scores 0.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    clipped = sum(min(count, ref_counts[tok]) for tok, count in cand_counts.items())
    p1 = clipped / len(cand)
    bp = min(1.0, math.exp(1.0 - len(ref) / len(cand)))
    return p1 * bp


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties assigned the mean of their positions."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.float64)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of average-assigned ranks."""
    if len(x) != len(y):
        raise LengthMismatch(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("spearman requires at least two observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    denom = math.sqrt(float(sx @ sx) * float(sy @ sy))
    if denom == 0.0:
        raise ConstantInput("spearman is undefined when an input is constant")
    return float(sx @ sy) / denom


def precision_at_k(retrieved: Sequence[str], relevant: set[str], k: int) -> float:
    """Fraction of the first min(k, |retrieved|) results that are relevant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not retrieved:
        raise EmptyRetrieval("no retrieved ids to score")
    cutoff = min(k, len(retrieved))
    hits = sum(1 for doc_id in retrieved[:cutoff] if doc_id in relevant)
    return hits / cutoff
