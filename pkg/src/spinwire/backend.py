"""Backend selection: compiled core when available, NumPy/SciPy otherwise.

The environment variable ``SPINWIRE_BACKEND`` (``compiled`` or ``python``)
pins the choice at import time; :func:`set_backend` switches it at runtime
(used by the tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"python": _fallback}
if _core is not None:
    _BACKENDS["compiled"] = _core


def _initial():
    forced = os.environ.get("SPINWIRE_BACKEND")
    if forced is not None:
        if forced not in _BACKENDS:
            raise ImportError(
                f"SPINWIRE_BACKEND={forced!r} not available; "
                f"choose from {sorted(_BACKENDS)}")
        return _BACKENDS[forced]
    return _BACKENDS.get("compiled", _fallback)


_active = _initial()


def available_backends():
    return sorted(_BACKENDS)


def active_backend():
    """The module providing eigh_tridiagonal / evolve_piecewise."""
    return _active


def set_backend(name: str):
    """Switch backends; returns the previously active one."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    previous = _active
    _active = _BACKENDS[name]
    return previous
