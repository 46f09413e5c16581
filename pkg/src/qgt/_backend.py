"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded. Set ``QGT_BACKEND=python`` to force the fallback.
"""
import importlib
import os

BACKENDS = ("cython", "python")
_MODULES = {"cython": "qgt._ckernels", "python": "qgt._pykernels"}


def load_backend(name):
    """Import and return the kernel module for backend ``name``."""
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    return importlib.import_module(_MODULES[name])


def available_backends():
    names = []
    for name in BACKENDS:
        try:
            load_backend(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    forced = os.environ.get("QGT_BACKEND", "").strip().lower()
    if forced:
        return forced, load_backend(forced)
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", load_backend("python")


BACKEND_NAME, kernels = _select()
