"""Candidate-term ranking and correlation-based query selection.

Candidate terms come from a pre-tokenized corpus (one document per line,
whitespace-separated terms). Terms are ranked either by corpus tf-idf or
by raw frequency; a term becomes a query when its weekly volume correlates
with the target series strictly above the configured threshold.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import AlignmentError, DegenerateInput, EmptyCorpus
from .series import WeeklySeries, pearson


@dataclass(frozen=True)
class RankedTerm:
    term: str
    score: float


@dataclass(frozen=True)
class SelectionConfig:
    """Strict-greater correlation threshold in (0, 1)."""

    threshold: float

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0,1), got {self.threshold}")


@dataclass(frozen=True)
class CandidateQuery:
    term: str
    volume: WeeklySeries

    def __post_init__(self):
        if not self.term:
            raise ValueError("term must be non-empty")


@dataclass
class SelectionResult:
    """Selected (term, correlation) pairs plus a degenerate-candidate count."""

    selected: list[tuple[str, float]] = field(default_factory=list)
    skipped_degenerate: int = 0

    def terms(self) -> list[str]:
        return [term for term, _ in self.selected]


def _ranked(scores: dict[str, float], k: int) -> list[RankedTerm]:
    # Descending score, ties broken by lexicographic term order: total order.
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [RankedTerm(term, score) for term, score in ordered[:k]]


def rank_tfidf(corpus: Sequence[Sequence[str]], k: int) -> list[RankedTerm]:
    """Top-k terms by corpus-level tf-idf.

    score(term) = (total count of term in the corpus) * ln(N / df), with N
    the number of documents and df the number of documents containing the
    term. A single-document corpus therefore scores every term zero.
    """
    if not corpus:
        raise EmptyCorpus("tf-idf ranking needs at least one document")
    if k < 0:
        raise ValueError("k must be non-negative")
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for doc in corpus:
        tf.update(doc)
        df.update(set(doc))
    n_docs = len(corpus)
    scores = {term: tf[term] * math.log(n_docs / df[term]) for term in tf}
    return _ranked(scores, k)


def rank_frequency(corpus: Sequence[Sequence[str]], k: int) -> list[RankedTerm]:
    """Top-k terms by raw corpus frequency, ties lexicographic."""
    if not corpus:
        raise EmptyCorpus("frequency ranking needs at least one document")
    if k < 0:
        raise ValueError("k must be non-negative")
    tf: Counter[str] = Counter()
    for doc in corpus:
        tf.update(doc)
    return _ranked({term: float(count) for term, count in tf.items()}, k)


def select_queries(candidates: Sequence[CandidateQuery], target: WeeklySeries,
                   config: SelectionConfig) -> SelectionResult:
    """Keep candidates whose volume correlates with the target strictly
    above the threshold, sorted by descending correlation.

    Candidates must cover exactly the target's week range. Zero-variance
    candidates cannot be scored; they are counted, not raised.
    """
    result = SelectionResult()
    kept: list[tuple[str, float]] = []
    for cand in candidates:
        vol = cand.volume
        if vol.start != target.start or vol.end != target.end:
            raise AlignmentError(
                f"candidate {cand.term!r} covers {vol.start}..{vol.end}, "
                f"target covers {target.start}..{target.end}")
        try:
            r = pearson(vol, target)
        except DegenerateInput:
            result.skipped_degenerate += 1
            continue
        if r > config.threshold:
            kept.append((cand.term, r))
    kept.sort(key=lambda item: (-item[1], item[0]))
    result.selected = kept
    return result


def read_corpus(path) -> list[list[str]]:
    """One document per line, terms whitespace-separated, UTF-8."""
    docs: list[list[str]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        terms = line.split()
        if terms:
            docs.append(terms)
    return docs
