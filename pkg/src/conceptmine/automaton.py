"""Token-level Aho-Corasick automaton in a flat array layout.

The automaton is built once per vocabulary and then only read, so it is
stored as contiguous int64 arrays that both the compiled and the
pure-Python matcher kernels can walk without further preparation:

- transitions in CSR form (``trans_offsets`` per state, symbols sorted
  within each state for binary search),
- failure links,
- full output sets in CSR form (outputs inherited through failure links
  are pre-merged, so a kernel never follows fail chains for output).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class TokenAutomaton:
    n_states: int
    n_patterns: int
    trans_offsets: np.ndarray
    trans_symbols: np.ndarray
    trans_targets: np.ndarray
    fail: np.ndarray
    out_offsets: np.ndarray
    out_patterns: np.ndarray
    pattern_lengths: np.ndarray


def build_token_automaton(patterns: Sequence[tuple[int, ...]]) -> TokenAutomaton:
    """Compile token-id patterns into a :class:`TokenAutomaton`.

    Patterns must be non-empty tuples of non-negative ints.
    """
    if not patterns:
        raise ValueError("automaton needs at least one pattern")
    for pattern in patterns:
        if not pattern or any(t < 0 for t in pattern):
            raise ValueError(f"invalid pattern: {pattern!r}")

    goto: list[dict[int, int]] = [{}]
    out: list[list[int]] = [[]]
    for pattern_id, pattern in enumerate(patterns):
        state = 0
        for symbol in pattern:
            nxt = goto[state].get(symbol)
            if nxt is None:
                nxt = len(goto)
                goto[state][symbol] = nxt
                goto.append({})
                out.append([])
            state = nxt
        out[state].append(pattern_id)

    fail = [0] * len(goto)
    queue: deque[int] = deque()
    for state in goto[0].values():
        queue.append(state)
    while queue:
        state = queue.popleft()
        for symbol, nxt in goto[state].items():
            queue.append(nxt)
            probe = fail[state]
            while symbol not in goto[probe] and probe != 0:
                probe = fail[probe]
            fail[nxt] = goto[probe].get(symbol, 0)
            # BFS order visits fail targets first, so their output sets
            # are already complete when merged here.
            out[nxt].extend(out[fail[nxt]])

    n_states = len(goto)
    trans_offsets = np.zeros(n_states + 1, dtype=np.int64)
    symbols: list[int] = []
    targets: list[int] = []
    for state in range(n_states):
        for symbol in sorted(goto[state]):
            symbols.append(symbol)
            targets.append(goto[state][symbol])
        trans_offsets[state + 1] = len(symbols)

    out_offsets = np.zeros(n_states + 1, dtype=np.int64)
    out_flat: list[int] = []
    for state in range(n_states):
        out_flat.extend(sorted(out[state]))
        out_offsets[state + 1] = len(out_flat)

    return TokenAutomaton(
        n_states=n_states,
        n_patterns=len(patterns),
        trans_offsets=trans_offsets,
        trans_symbols=np.asarray(symbols, dtype=np.int64),
        trans_targets=np.asarray(targets, dtype=np.int64),
        fail=np.asarray(fail, dtype=np.int64),
        out_offsets=out_offsets,
        out_patterns=np.asarray(out_flat, dtype=np.int64),
        pattern_lengths=np.asarray([len(p) for p in patterns], dtype=np.int64),
    )
