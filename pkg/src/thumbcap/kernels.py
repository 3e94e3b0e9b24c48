"""Kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to the
pure numpy implementations otherwise. THUMBCAP_PURE=1 forces the fallback
(useful for benchmarking and for debugging a suspected kernel issue).
"""
from __future__ import annotations

import os

from . import _purekern

if os.environ.get("THUMBCAP_PURE"):
    _impl = _purekern
    BACKEND = "pure"
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _purekern
        BACKEND = "pure"

token_hash = _impl.token_hash
hash_scatter = _impl.hash_scatter
rank_from_sims = _impl.rank_from_sims
adam_update = _impl.adam_update


def compiled_available() -> bool:
    try:
        from . import _ckern  # noqa: F401

        return True
    except ImportError:
        return False
