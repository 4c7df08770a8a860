"""Backend selection: compiled extension when available, NumPy otherwise.

The environment variable ``GAPCLUST_BACKEND`` (``compiled``, ``python`` or
``auto``) fixes the choice at import time; :func:`set_backend` switches it
at runtime (used by the backend benchmark and tests). Both backends yield
bit-identical messages, so the choice affects speed only.
"""

from __future__ import annotations

import os

from . import _mp_py
from .errors import ParameterError

try:
    from . import _mp
except ImportError:
    _mp = None

_BACKENDS = {"python": _mp_py}
if _mp is not None:
    _BACKENDS["compiled"] = _mp

_active = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str):
    """Select the active backend by name ('auto' picks compiled if built)."""
    global _active
    if name == "auto":
        name = "compiled" if _mp is not None else "python"
    if name not in _BACKENDS:
        raise ParameterError(
            f"backend {name!r} not available (have {available_backends()})"
        )
    _active = _BACKENDS[name]
    return _active


def get_backend(name: str | None = None):
    """Return a kernel module: the named one, or the active default."""
    if name is not None and name != "auto":
        if name not in _BACKENDS:
            raise ParameterError(
                f"backend {name!r} not available (have {available_backends()})"
            )
        return _BACKENDS[name]
    return _active


def active_backend_name() -> str:
    return "compiled" if _active is not None and _active.COMPILED else "python"


set_backend(os.environ.get("GAPCLUST_BACKEND", "auto"))
