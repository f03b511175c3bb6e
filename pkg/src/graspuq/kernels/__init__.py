"""Backend selection for the clearance kernels.

The compiled extension is preferred when it imported cleanly; otherwise
the numpy fallback is used. Set ``GRASPUQ_BACKEND=numpy`` (or ``native``)
to force a choice; forcing ``native`` when the extension is unavailable
raises ImportError rather than silently degrading.
"""

import os

from . import _fallback

try:
    from . import _native
except ImportError:
    _native = None

_FORCED = os.environ.get("GRASPUQ_BACKEND", "").strip().lower()

if _FORCED in ("numpy", "python", "fallback"):
    _impl = _fallback
elif _FORCED == "native":
    if _native is None:
        raise ImportError(
            "GRASPUQ_BACKEND=native but the compiled kernel module is missing"
        )
    _impl = _native
elif _FORCED:
    raise ImportError(f"unknown GRASPUQ_BACKEND value: {_FORCED!r}")
else:
    _impl = _native if _native is not None else _fallback

BACKEND = _impl.NAME

min_jaw_distance_sq = _impl.min_jaw_distance_sq
jaw_clearance_check = _impl.jaw_clearance_check


def available_backends():
    """Names of importable kernel backends."""
    names = ["numpy"]
    if _native is not None:
        names.append("native")
    return names


def get_impl(name):
    """Fetch a specific backend module by name ('numpy' or 'native')."""
    if name == "numpy":
        return _fallback
    if name == "native":
        if _native is None:
            raise ImportError("compiled kernel module is not available")
        return _native
    raise ValueError(f"unknown backend {name!r}")
