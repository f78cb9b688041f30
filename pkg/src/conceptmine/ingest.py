"""Corpus loading from JSONL files.

One JSON object per line with required string fields ``id`` and ``text``;
any other fields are preserved as string metadata. Documents are kept in
canonical (doc_id-sorted) order so matrix row i always means the i-th
document regardless of input line order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

ConceptId = str


class CorpusError(ValueError):
    """Malformed corpus file or violated corpus invariant."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Corpus:
    docs: tuple[Document, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_index", {d.doc_id: i for i, d in enumerate(self.docs)}
        )

    def __len__(self) -> int:
        return len(self.docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index  # type: ignore[attr-defined]

    def index_of(self, doc_id: str) -> int:
        try:
            return self._index[doc_id]  # type: ignore[attr-defined]
        except KeyError:
            raise CorpusError(f"unknown doc id: {doc_id!r}") from None

    def get(self, doc_id: str) -> Document:
        return self.docs[self.index_of(doc_id)]

    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.docs)


def _coerce_meta(value: object) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def load_corpus(path: str | Path) -> Corpus:
    """Read a JSONL corpus into canonical order.

    Raises :class:`CorpusError` with the 1-based line number for malformed
    JSON or missing/non-string ``id``/``text`` fields, and on duplicate
    doc ids.
    """
    docs: list[Document] = []
    seen: dict[str, int] = {}
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"line {line_no}: expected a JSON object")
            doc_id = record.get("id")
            text = record.get("text")
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusError(f"line {line_no}: missing or non-string 'id'")
            if not isinstance(text, str):
                raise CorpusError(f"line {line_no}: missing or non-string 'text'")
            if doc_id in seen:
                raise CorpusError(
                    f"line {line_no}: duplicate doc id {doc_id!r} "
                    f"(first seen on line {seen[doc_id]})"
                )
            seen[doc_id] = line_no
            meta = {
                key: _coerce_meta(value)
                for key, value in record.items()
                if key not in ("id", "text")
            }
            docs.append(Document(doc_id=doc_id, text=text, meta=meta))
    docs.sort(key=lambda d: d.doc_id)
    return Corpus(docs=tuple(docs))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize in canonical order; loading the result reproduces the corpus."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for doc in corpus.docs:
            record: dict[str, object] = {"id": doc.doc_id, "text": doc.text}
            for key in sorted(doc.meta):
                record[key] = doc.meta[key]
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
