"""Kernel backend selection.

The hot loops (per-element tag updates, query traversals) exist twice: as
plain numpy/python reference code and as numba-compiled versions of the
same computation.  The ``LBKD_BACKEND`` environment variable picks one:

``auto``
    Use the JIT kernels when numba imports cleanly, else fall back to the
    reference kernels.  This is the default.
``numba``
    Require the JIT kernels; raise if numba is unavailable.
``numpy``
    Force the reference kernels even when numba is installed.

The variable is consulted on every dispatch, so tests and benchmarks can
flip backends mid-process by setting the environment.
"""

from __future__ import annotations

import os

ENV_VAR = "LBKD_BACKEND"

_modules: dict[str, object] = {}


def _numba_usable() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name() -> str:
    """Resolve the active backend name (``"numba"`` or ``"numpy"``)."""
    requested = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be auto, numba, or numpy (got {requested!r})"
        )
    if requested == "auto":
        return "numba" if _numba_usable() else "numpy"
    return requested


def get_kernels():
    """Import (once per process) and return the active kernel module."""
    name = backend_name()
    mod = _modules.get(name)
    if mod is None:
        if name == "numba":
            from . import kernels_numba as mod
        else:
            from . import kernels_numpy as mod
        _modules[name] = mod
    return mod
