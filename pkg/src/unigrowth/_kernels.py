"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when it imports; otherwise the
pure-Python ``_kernels_py`` module.  Set ``UNIGROWTH_PURE_PYTHON=1`` to
force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("UNIGROWTH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

append_letter = _impl.append_letter
reduce_word = _impl.reduce_word
lex_normal_form = _impl.lex_normal_form
normal_form = _impl.normal_form
canonical_code = _impl.canonical_code
decode_code = _impl.decode_code
canonicalize_splits = _impl.canonicalize_splits
decode_splits = _impl.decode_splits
derivation_codec_check = _impl.derivation_codec_check


def backends() -> dict:
    """All importable backends by name (used by tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _core
        out["cython"] = _core
    except ImportError:
        pass
    return out
