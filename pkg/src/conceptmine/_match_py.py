"""Pure-Python matcher kernel. Fallback for :mod:`conceptmine._match_cy`."""

from __future__ import annotations

from .automaton import TokenAutomaton


def ac_search(token_ids, automaton: TokenAutomaton) -> list[tuple[int, int, int]]:
    """Walk the automaton over a token-id sequence.

    ``token_ids`` holds one int64 per document token; ids unknown to the
    vocabulary are negative. Returns ``(start_token, end_token, pattern)``
    triples with ``end_token`` exclusive, in scan order.
    """
    trans_offsets = automaton.trans_offsets.tolist()
    trans_symbols = automaton.trans_symbols.tolist()
    trans_targets = automaton.trans_targets.tolist()
    fail = automaton.fail.tolist()
    out_offsets = automaton.out_offsets.tolist()
    out_patterns = automaton.out_patterns.tolist()
    pattern_lengths = automaton.pattern_lengths.tolist()

    def step(state: int, symbol: int) -> int:
        lo = trans_offsets[state]
        hi = trans_offsets[state + 1]
        while lo < hi:
            mid = (lo + hi) // 2
            if trans_symbols[mid] < symbol:
                lo = mid + 1
            else:
                hi = mid
        if lo < trans_offsets[state + 1] and trans_symbols[lo] == symbol:
            return trans_targets[lo]
        return -1

    matches: list[tuple[int, int, int]] = []
    state = 0
    for position, symbol in enumerate(token_ids):
        symbol = int(symbol)
        if symbol < 0:
            state = 0
            continue
        nxt = step(state, symbol)
        while nxt < 0 and state != 0:
            state = fail[state]
            nxt = step(state, symbol)
        state = nxt if nxt >= 0 else 0
        for k in range(out_offsets[state], out_offsets[state + 1]):
            pattern = out_patterns[k]
            matches.append((position + 1 - pattern_lengths[pattern], position + 1, pattern))
    return matches
