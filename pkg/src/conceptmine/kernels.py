"""Matcher kernel selection.

The compiled Aho-Corasick walk is preferred when the extension built;
otherwise the pure-Python twin takes over. Set ``CONCEPTMINE_PURE_PYTHON=1``
to force the fallback (used by tests and the benchmark).
"""

from __future__ import annotations

import os
from typing import Callable

from . import _match_py

SearchFn = Callable[..., list[tuple[int, int, int]]]

_KERNELS: dict[str, SearchFn] = {"python": _match_py.ac_search}

if os.environ.get("CONCEPTMINE_PURE_PYTHON") != "1":
    try:
        from . import _match_cy

        _KERNELS["cython"] = _match_cy.ac_search
    except ImportError:
        pass

BACKEND: str = "cython" if "cython" in _KERNELS else "python"

ac_search: SearchFn = _KERNELS[BACKEND]


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


def get_kernel(backend: str | None = None) -> SearchFn:
    """Resolve a kernel by name; ``None`` picks the import-time default."""
    if backend is None:
        return ac_search
    try:
        return _KERNELS[backend]
    except KeyError:
        raise ValueError(
            f"unknown matcher backend {backend!r}, "
            f"available: {', '.join(available_backends())}"
        ) from None
