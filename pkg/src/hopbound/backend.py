"""Selection of the superframe-loop backend at import time.

The compiled extension is used when present; otherwise the pure-Python
reference loop takes over.  Set ``HOPBOUND_PURE_PY=1`` to force the
fallback (useful for benchmarking and cross-checking).  Both backends
produce bit-identical results.
"""

from __future__ import annotations

import os

from . import _simloop_py

try:
    from . import _simloop  # type: ignore[attr-defined]

    COMPILED_AVAILABLE = True
except ImportError:
    _simloop = None  # type: ignore[assignment]
    COMPILED_AVAILABLE = False

_FORCE_PURE = os.environ.get("HOPBOUND_PURE_PY", "") not in ("", "0")

DEFAULT_BACKEND = "cython" if COMPILED_AVAILABLE and not _FORCE_PURE else "python"


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if COMPILED_AVAILABLE else ("python",)


def get_loop(name: str | None = None):
    """Return the queue-loop callable of the named backend
    ("cython" | "python"; None = the import-time default)."""
    name = name or DEFAULT_BACKEND
    if name == "python":
        return _simloop_py.run_queue_loop
    if name == "cython":
        if not COMPILED_AVAILABLE:
            raise RuntimeError("compiled backend requested but the extension is not built")
        return _simloop.run_queue_loop
    raise ValueError(f"unknown backend {name!r}")
