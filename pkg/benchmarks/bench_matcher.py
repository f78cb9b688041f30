"""Benchmark the matcher kernels: compiled extension vs pure Python.

Measures the raw automaton walk over pre-tokenized documents and the full
find_mentions path (tokenization included), verifying both backends
produce identical mentions.

    python3 benchmarks/bench_matcher.py --lexicon data/lexicon.csv \
        --corpus data/corpus.jsonl --repeat 20
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

import numpy as np

from conceptmine.ingest import Document, load_corpus
from conceptmine.kernels import available_backends, get_kernel
from conceptmine.lexicon import build_vocabulary, load_lexicon
from conceptmine.ner import find_mentions
from conceptmine.pipeline import select_concepts
from conceptmine.tokenize import tokenize


def best_of(runs: int, fn) -> float:
    times = []
    for _ in range(runs):
        started = time.perf_counter()
        fn()
        times.append(time.perf_counter() - started)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lexicon", type=Path, default=Path("data/lexicon.csv"))
    parser.add_argument("--corpus", type=Path, default=Path("data/corpus.jsonl"))
    parser.add_argument("--repeat", type=int, default=20,
                        help="corpus replication factor")
    parser.add_argument("--runs", type=int, default=5,
                        help="timing repetitions, best run wins")
    args = parser.parse_args()

    lexicon = load_lexicon(args.lexicon)
    vocab = build_vocabulary(
        lexicon, select_concepts(lexicon, ("mental_disorder", "adverse_event"))
    )
    base = load_corpus(args.corpus)
    docs = [
        Document(doc_id=f"{d.doc_id}-{k}", text=d.text)
        for k in range(args.repeat)
        for d in base.docs
    ]
    token_arrays = []
    n_tokens = 0
    for doc in docs:
        tokens = tokenize(doc.text)
        n_tokens += len(tokens)
        token_arrays.append(
            np.fromiter(
                (vocab.token_ids.get(t.text.lower(), -1) for t in tokens),
                dtype=np.int64, count=len(tokens),
            )
        )

    backends = available_backends()
    print(f"documents: {len(docs)}   tokens: {n_tokens}   "
          f"patterns: {len(vocab)}   backends: {', '.join(backends)}")

    reference = None
    kernel_times: dict[str, float] = {}
    full_times: dict[str, float] = {}
    for backend in backends:
        kernel = get_kernel(backend)

        def walk_all():
            total = 0
            for ids in token_arrays:
                total += len(kernel(ids, vocab.automaton))
            return total

        kernel_times[backend] = best_of(args.runs, walk_all)

        def match_all():
            return [find_mentions(doc, vocab, backend=backend) for doc in docs]

        full_times[backend] = best_of(args.runs, match_all)
        mentions = match_all()
        if reference is None:
            reference = mentions
        elif mentions != reference:
            raise AssertionError(f"backend {backend} disagrees with reference")

    print(f"{'backend':<10} {'kernel walk':>14} {'tokens/s':>12} "
          f"{'find_mentions':>14} {'docs/s':>10}")
    for backend in backends:
        kt = kernel_times[backend]
        ft = full_times[backend]
        print(f"{backend:<10} {kt * 1e3:>11.1f} ms {n_tokens / kt:>12.0f} "
              f"{ft * 1e3:>11.1f} ms {len(docs) / ft:>10.0f}")
    if len(backends) == 2:
        speedup = kernel_times["python"] / kernel_times["cython"]
        overall = full_times["python"] / full_times["cython"]
        print(f"compiled kernel speedup: {speedup:.1f}x on the walk, "
              f"{overall:.1f}x end to end (outputs identical)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
