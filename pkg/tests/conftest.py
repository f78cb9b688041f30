from pathlib import Path

import pytest

from conceptmine.lexicon import Concept, Lexicon

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"

LEXICON_HEADER = "concept_id,term,is_preferred,parent_ids,group\n"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


def write_lexicon_csv(path: Path, rows: list[str]) -> Path:
    path.write_text(LEXICON_HEADER + "".join(r + "\n" for r in rows), encoding="utf-8")
    return path


def flat_lexicon(concept_ids: list[str]) -> Lexicon:
    """Parent-free lexicon where each concept's only term is its id."""
    concepts = tuple(
        Concept(id=cid, preferred_name=cid, synonyms=(), parents=(), group="")
        for cid in sorted(concept_ids)
    )
    return Lexicon(
        concepts=concepts,
        term_index={c.preferred_name.lower(): (c.id,) for c in concepts},
    )
