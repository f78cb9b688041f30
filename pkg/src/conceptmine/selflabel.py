"""Self-supervised mention labeling.

Each mention is scored by the cosine similarity between its concept's
embedding and the count-weighted, leave-one-out sum of the embeddings of
the other concepts in the same document. Sweeping a threshold over the
scores turns them into positive/negative labels without any annotation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .matrix import DocConceptMatrix, cosine_similarity, document_context_vector
from .ner import Mention


@dataclass(frozen=True)
class ScoredMention:
    mention: Mention
    score: float


def _default_thresholds() -> tuple[float, ...]:
    return tuple(i / 20 for i in range(21))


@dataclass(frozen=True)
class ThresholdSweep:
    """Strictly increasing thresholds within [-1, 1]; defaults to
    0.00, 0.05, ..., 1.00."""

    thresholds: tuple[float, ...] = field(default_factory=_default_thresholds)

    def __post_init__(self) -> None:
        if not self.thresholds:
            raise ValueError("sweep needs at least one threshold")
        for tau in self.thresholds:
            if not -1.0 <= tau <= 1.0:
                raise ValueError(f"threshold {tau} outside [-1, 1]")
        if any(
            b <= a for a, b in zip(self.thresholds, self.thresholds[1:])
        ):
            raise ValueError("thresholds must be strictly increasing")


def score_mentions(
    mentions: Sequence[Mention],
    X: DocConceptMatrix,
    embeddings: np.ndarray,
) -> list[ScoredMention]:
    """Score every mention against its document context.

    ``embeddings`` holds one row per concept of ``X``, in concept order
    (raw co-occurrence rows and encoded vectors both work). Filtered
    mentions are scored as well, flag intact. A mention whose concept has
    no embedding row raises ValueError naming the concept.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2 or embeddings.shape[0] != X.m_concepts:
        raise ValueError(
            f"embeddings shape {embeddings.shape} does not cover "
            f"{X.m_concepts} concepts"
        )
    scored: list[ScoredMention] = []
    for mention in mentions:
        if not X.has_concept(mention.concept_id):
            raise ValueError(
                f"no embedding for concept {mention.concept_id!r}"
            )
        concept = X.concept_index(mention.concept_id)
        doc = X.doc_index(mention.doc_id)
        context = document_context_vector(X, embeddings, doc, exclude=concept)
        score = cosine_similarity(embeddings[concept], context)
        scored.append(ScoredMention(mention=mention, score=score))
    return scored


def label_at_threshold(
    scored: Sequence[ScoredMention], tau: float
) -> list[tuple[Mention, bool]]:
    """Positive iff score >= tau and the mention is unfiltered."""
    if not -1.0 <= tau <= 1.0:
        raise ValueError(f"threshold {tau} outside [-1, 1]")
    return [
        (s.mention, (not s.mention.filtered) and s.score >= tau) for s in scored
    ]


def write_scored(scored: Sequence[ScoredMention], path: str | Path) -> None:
    ordered = sorted(scored, key=lambda s: s.mention.sort_key())
    with Path(path).open("w", encoding="utf-8") as handle:
        for s in ordered:
            m = s.mention
            record = {
                "doc_id": m.doc_id,
                "concept_id": m.concept_id,
                "start": m.start,
                "end": m.end,
                "surface": m.surface,
                "filtered": m.filtered,
                "filter_reason": m.filter_reason,
                "score": s.score,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_scored(path: str | Path) -> list[ScoredMention]:
    scored = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            score = record.pop("score")
            scored.append(
                ScoredMention(mention=Mention(**record), score=score)
            )
    return scored


def write_labels_csv(
    scored: Sequence[ScoredMention], tau: float, path: str | Path
) -> None:
    """Per-threshold label file: doc_id,start,end,concept_id,score,label."""
    ordered = sorted(scored, key=lambda s: s.mention.sort_key())
    labeled = label_at_threshold(ordered, tau)
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["doc_id", "start", "end", "concept_id", "score", "label"])
        for s, (mention, label) in zip(ordered, labeled):
            writer.writerow(
                [
                    mention.doc_id,
                    mention.start,
                    mention.end,
                    mention.concept_id,
                    repr(s.score),
                    "true" if label else "false",
                ]
            )
