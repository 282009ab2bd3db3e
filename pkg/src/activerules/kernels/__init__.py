"""Backend dispatch for the hot numeric kernels.

Two interchangeable implementations exist: a numba-jitted one and a
pure-numpy one. The active backend is chosen at import time from the
``ACTIVERULES_BACKEND`` environment variable (``numba`` or ``numpy``);
unset, numba is used when importable. ``set_backend`` switches at
runtime, which the benchmark and the cross-backend tests rely on.
"""
from __future__ import annotations

import os

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}
try:
    from . import numba_backend

    _BACKENDS["numba"] = numba_backend
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

_active_name = ""


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {sorted(_BACKENDS)}"
        )
    global _active_name
    _active_name = name


def backend_name() -> str:
    return _active_name


def _default_backend() -> str:
    env = os.environ.get("ACTIVERULES_BACKEND", "").strip().lower()
    if env:
        return env
    return "numba" if NUMBA_AVAILABLE else "numpy"


set_backend(_default_backend())


def cover_matrix(X, kinds, lo, hi, mask):
    return _BACKENDS[_active_name].cover_matrix(X, kinds, lo, hi, mask)


def min_gower_distances(C, E, kinds, ranges):
    return _BACKENDS[_active_name].min_gower_distances(C, E, kinds, ranges)
