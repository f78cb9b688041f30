"""Document-concept counts, concept co-occurrence, and cosine similarity.

The document-level matrix counts unfiltered mentions per (document,
concept). Its concept columns cover exactly the concepts observed
unfiltered in the corpus, in id-sorted order. The concept-level matrix
counts, for each concept pair, the number of documents containing both;
its rows serve as raw concept embeddings.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from .ingest import Corpus
from .lexicon import ConceptId, Lexicon
from .ner import Mention


class MatrixError(ValueError):
    """Mention references an unknown document or concept."""


@dataclass(frozen=True, eq=False)
class DocConceptMatrix:
    """Sparse n x m matrix of unfiltered mention counts."""

    doc_ids: tuple[str, ...]
    concept_ids: tuple[ConceptId, ...]
    counts: sparse.csr_matrix

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_concept_index", {c: j for j, c in enumerate(self.concept_ids)}
        )
        object.__setattr__(
            self, "_doc_index", {d: i for i, d in enumerate(self.doc_ids)}
        )

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def m_concepts(self) -> int:
        return len(self.concept_ids)

    def doc_index(self, doc_id: str) -> int:
        return self._doc_index[doc_id]  # type: ignore[attr-defined]

    def concept_index(self, concept_id: ConceptId) -> int:
        return self._concept_index[concept_id]  # type: ignore[attr-defined]

    def has_concept(self, concept_id: ConceptId) -> bool:
        return concept_id in self._concept_index  # type: ignore[attr-defined]

    def triplets(self) -> Iterator[tuple[int, int, int]]:
        yield from _iter_triplets(self.counts)


@dataclass(frozen=True, eq=False)
class CoocMatrix:
    """Symmetric m x m document-level co-occurrence counts.

    ``counts[i, j]`` is the number of documents containing both concept i
    and concept j at least once (unfiltered); the diagonal is the
    document frequency. Row i is the raw embedding of concept i.
    """

    concept_ids: tuple[ConceptId, ...]
    counts: sparse.csr_matrix

    @property
    def m_concepts(self) -> int:
        return len(self.concept_ids)

    def triplets(self) -> Iterator[tuple[int, int, int]]:
        yield from _iter_triplets(self.counts)


def _iter_triplets(matrix: sparse.csr_matrix) -> Iterator[tuple[int, int, int]]:
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    for k in order:
        value = int(coo.data[k])
        if value != 0:
            yield int(coo.row[k]), int(coo.col[k]), value


def build_doc_concept_matrix(
    corpus: Corpus, mentions: Sequence[Mention], lexicon: Lexicon
) -> DocConceptMatrix:
    """Count unfiltered mentions per (document, concept).

    Concept columns are the id-sorted concepts with at least one
    unfiltered mention; documents keep corpus order, including all-zero
    rows. Mentions referencing unknown documents or concepts raise
    :class:`MatrixError`.
    """
    for mention in mentions:
        if mention.doc_id not in corpus:
            raise MatrixError(f"mention references unknown doc {mention.doc_id!r}")
        if mention.concept_id not in lexicon:
            raise MatrixError(
                f"mention references unknown concept {mention.concept_id!r}"
            )
    kept = [m for m in mentions if not m.filtered]
    concept_ids = tuple(sorted({m.concept_id for m in kept}))
    concept_index = {c: j for j, c in enumerate(concept_ids)}
    tally = Counter((corpus.index_of(m.doc_id), concept_index[m.concept_id]) for m in kept)
    rows = np.fromiter((k[0] for k in tally), dtype=np.int64, count=len(tally))
    cols = np.fromiter((k[1] for k in tally), dtype=np.int64, count=len(tally))
    data = np.fromiter(tally.values(), dtype=np.int64, count=len(tally))
    counts = sparse.coo_matrix(
        (data, (rows, cols)), shape=(len(corpus), len(concept_ids)), dtype=np.int64
    ).tocsr()
    counts.sort_indices()
    return DocConceptMatrix(
        doc_ids=corpus.doc_ids(), concept_ids=concept_ids, counts=counts
    )


def build_cooc_matrix(X: DocConceptMatrix) -> CoocMatrix:
    """Binary document-level co-occurrence: entry (i, j) counts documents
    where both concepts occur; symmetric by construction."""
    binary = (X.counts > 0).astype(np.int64)
    cooc = (binary.T @ binary).tocsr()
    cooc.sort_indices()
    return CoocMatrix(concept_ids=X.concept_ids, counts=cooc)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two same-length vectors.

    Zero-norm inputs score 0 by convention. Identical and exactly
    opposite inputs short-circuit to +-1 so the boundary cases are exact;
    everything else is the dot product over the norm product, clamped to
    [-1, 1].
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    if np.array_equal(a, b):
        return 1.0
    if np.array_equal(a, -b):
        return -1.0
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))


def concept_embedding(
    C: CoocMatrix, i: int, normalized: bool = False
) -> np.ndarray:
    """Row i of the co-occurrence matrix as a dense float vector,
    optionally scaled to unit L2 norm (zero rows pass through)."""
    if not 0 <= i < C.m_concepts:
        raise ValueError(f"concept index {i} out of range [0, {C.m_concepts})")
    row = np.asarray(C.counts[i].todense()).ravel().astype(np.float64)
    if normalized:
        norm = float(np.linalg.norm(row))
        if norm > 0.0:
            row = row / norm
    return row


def concept_embeddings(C: CoocMatrix, normalized: bool = False) -> np.ndarray:
    """All co-occurrence rows as a dense (m, m) float array."""
    dense = np.asarray(C.counts.todense(), dtype=np.float64)
    if normalized and dense.size:
        norms = np.linalg.norm(dense, axis=1, keepdims=True)
        dense = np.divide(dense, norms, out=dense.copy(), where=norms > 0)
    return dense


def document_context_vector(
    X: DocConceptMatrix,
    embeddings: np.ndarray,
    doc: int,
    exclude: int | None = None,
) -> np.ndarray:
    """Count-weighted sum of the embeddings of the concepts in one
    document, optionally leaving one concept out; zero vector when the
    document contributes nothing."""
    if not 0 <= doc < X.n_docs:
        raise ValueError(f"doc index {doc} out of range [0, {X.n_docs})")
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2 or embeddings.shape[0] != X.m_concepts:
        raise ValueError(
            f"embeddings shape {embeddings.shape} does not cover "
            f"{X.m_concepts} concepts"
        )
    if exclude is not None and not 0 <= exclude < X.m_concepts:
        raise ValueError(f"exclude index {exclude} out of range [0, {X.m_concepts})")
    row = X.counts[doc]
    indices = row.indices
    weights = row.data.astype(np.float64)
    if exclude is not None:
        keep = indices != exclude
        indices = indices[keep]
        weights = weights[keep]
    if len(indices) == 0:
        return np.zeros(embeddings.shape[1], dtype=np.float64)
    return weights @ embeddings[indices]


def write_sparse_matrix(matrix: DocConceptMatrix | CoocMatrix, path: str | Path) -> None:
    """Text triplet format: header ``rows cols nnz`` then ``row col value``
    lines sorted by (row, col)."""
    shape = matrix.counts.shape
    triplets = list(matrix.triplets())
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write(f"{shape[0]} {shape[1]} {len(triplets)}\n")
        for row, col, value in triplets:
            handle.write(f"{row} {col} {value}\n")


def read_sparse_counts(path: str | Path) -> sparse.csr_matrix:
    with Path(path).open("r", encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: bad header, expected 'rows cols nnz'")
        n_rows, n_cols, nnz = (int(x) for x in header)
        rows = np.zeros(nnz, dtype=np.int64)
        cols = np.zeros(nnz, dtype=np.int64)
        data = np.zeros(nnz, dtype=np.int64)
        for k in range(nnz):
            parts = handle.readline().split()
            if len(parts) != 3:
                raise ValueError(f"{path}: truncated triplet list at entry {k}")
            rows[k], cols[k], data[k] = (int(x) for x in parts)
    counts = sparse.coo_matrix(
        (data, (rows, cols)), shape=(n_rows, n_cols), dtype=np.int64
    ).tocsr()
    counts.sort_indices()
    return counts


def write_id_file(ids: Sequence[str], path: str | Path) -> None:
    Path(path).write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")


def read_id_file(path: str | Path) -> tuple[str, ...]:
    return tuple(
        line for line in Path(path).read_text(encoding="utf-8").splitlines() if line
    )
