# cython: language_level=3
"""Compiled matcher kernel. Mirrors :mod:`conceptmine._match_py` exactly."""

from libc.stdint cimport int64_t
from libcpp.vector cimport vector

import numpy as np


cdef inline int64_t _step(
    int64_t state,
    int64_t symbol,
    const int64_t[::1] trans_offsets,
    const int64_t[::1] trans_symbols,
    const int64_t[::1] trans_targets,
) noexcept nogil:
    cdef int64_t lo = trans_offsets[state]
    cdef int64_t hi = trans_offsets[state + 1]
    cdef int64_t mid
    while lo < hi:
        mid = (lo + hi) // 2
        if trans_symbols[mid] < symbol:
            lo = mid + 1
        else:
            hi = mid
    if lo < trans_offsets[state + 1] and trans_symbols[lo] == symbol:
        return trans_targets[lo]
    return -1


def ac_search(token_ids, automaton):
    """Walk the automaton over a token-id sequence.

    Same contract as the pure-Python kernel: returns a list of
    ``(start_token, end_token, pattern)`` triples in scan order.
    """
    cdef const int64_t[::1] ids = np.ascontiguousarray(token_ids, dtype=np.int64)
    cdef const int64_t[::1] trans_offsets = automaton.trans_offsets
    cdef const int64_t[::1] trans_symbols = automaton.trans_symbols
    cdef const int64_t[::1] trans_targets = automaton.trans_targets
    cdef const int64_t[::1] fail = automaton.fail
    cdef const int64_t[::1] out_offsets = automaton.out_offsets
    cdef const int64_t[::1] out_patterns = automaton.out_patterns
    cdef const int64_t[::1] pattern_lengths = automaton.pattern_lengths

    cdef vector[int64_t] starts
    cdef vector[int64_t] ends
    cdef vector[int64_t] patterns
    cdef int64_t state = 0
    cdef int64_t nxt, symbol, pattern, k
    cdef Py_ssize_t position, n = ids.shape[0]

    with nogil:
        for position in range(n):
            symbol = ids[position]
            if symbol < 0:
                state = 0
                continue
            nxt = _step(state, symbol, trans_offsets, trans_symbols, trans_targets)
            while nxt < 0 and state != 0:
                state = fail[state]
                nxt = _step(state, symbol, trans_offsets, trans_symbols, trans_targets)
            state = nxt if nxt >= 0 else 0
            for k in range(out_offsets[state], out_offsets[state + 1]):
                pattern = out_patterns[k]
                starts.push_back(position + 1 - pattern_lengths[pattern])
                ends.push_back(position + 1)
                patterns.push_back(pattern)

    cdef Py_ssize_t i
    return [
        (starts[i], ends[i], patterns[i]) for i in range(<Py_ssize_t>starts.size())
    ]
