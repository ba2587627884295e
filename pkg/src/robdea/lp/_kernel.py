"""Selects the tableau kernel at import: compiled if built, else pure Python.

Setting ``ROBDEA_BACKEND=python`` forces the fallback even when the
extension is available.
"""

import os

from . import _pytableau

try:
    from . import _ctableau
except ImportError:  # extension not built
    _ctableau = None

_BACKENDS = {"python": _pytableau}
if _ctableau is not None:
    _BACKENDS["cython"] = _ctableau

_active = _ctableau if _ctableau is not None else _pytableau
if os.environ.get("ROBDEA_BACKEND", "").lower() == "python":
    _active = _pytableau


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _active is _ctableau and _ctableau is not None else "python"


def use_backend(name):
    """Switch the kernel used by every subsequent solve; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def simplex(T, basis, n_enter, max_iter, tol_opt, tol_piv, bland_after):
    return _active.simplex(T, basis, n_enter, max_iter, tol_opt, tol_piv, bland_after)


def pivot(T, row, col):
    _active.pivot(T, row, col)


def prepare(A, b, codes, tol_feas):
    return _active.prepare(A, b, codes, tol_feas)
