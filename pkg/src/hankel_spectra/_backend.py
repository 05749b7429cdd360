"""Import-time selection between the compiled and the numpy quadrature kernel.

Set ``HANKEL_SPECTRA_PURE=1`` to force the numpy fallback.
"""

import os

from . import _quad_py

try:
    from . import _quadkernel as _compiled
except ImportError:  # extension not built
    _compiled = None

_forced_pure = os.environ.get("HANKEL_SPECTRA_PURE", "") not in ("", "0")

BACKEND = "compiled" if (_compiled is not None and not _forced_pure) else "python"


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def laplace_batch(t, power, gamma, upper, smooth, tol, rel_tol, limit, backend=None):
    """Dispatch to the selected kernel; see ``_quad_py.laplace_batch``."""
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel is not available")
        return _compiled.laplace_batch(t, power, gamma, upper, smooth, tol, rel_tol, limit)
    if backend == "python":
        return _quad_py.laplace_batch(t, power, gamma, upper, smooth, tol, rel_tol, limit)
    raise ValueError(f"unknown backend {backend!r}")
