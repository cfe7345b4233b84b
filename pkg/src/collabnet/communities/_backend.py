"""Kernel backend selection: compiled extension if importable, else pure Python.

Both backends expose the same functions and produce bit-identical results;
the environment variable COLLABNET_BACKEND=python forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None

if _kernel is not None and os.environ.get("COLLABNET_BACKEND") != "python":
    DEFAULT_BACKEND = "cython"
else:
    DEFAULT_BACKEND = "python"

_BACKENDS = {"python": _kernel_py}
if _kernel is not None:
    _BACKENDS["cython"] = _kernel


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = DEFAULT_BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; "
                         f"available: {available_backends()}") from None
