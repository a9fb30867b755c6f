"""Kernel backend selection.

The compiled extension is preferred; ``POINTLINE_BACKEND=python`` forces the
NumPy fallback. ``POINTLINE_NUM_THREADS`` sets the default thread count for
the parallel brute-force scan.
"""
import os

from pointline import _fallback

try:
    from pointline import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_requested = os.environ.get("POINTLINE_BACKEND", "").strip().lower()
if _requested and _requested not in BACKENDS:
    raise ImportError(f"POINTLINE_BACKEND={_requested!r} is not available; have {sorted(BACKENDS)}")
BACKEND_NAME = _requested or ("compiled" if _compiled is not None else "python")
kernels = BACKENDS[BACKEND_NAME]


def default_threads():
    try:
        return max(1, int(os.environ.get("POINTLINE_NUM_THREADS", "1")))
    except ValueError:
        return 1


def get(name=None):
    """Kernel module by name; the active backend when ``name`` is None."""
    if name is None:
        return kernels
    return BACKENDS[name]
