"""Select the kernel backend at import time.

The compiled ``_kernels`` extension is used when it is importable and
``ERWALK_PURE_PYTHON`` is unset (or ``0``); otherwise the numpy fallback.
"""
import os

from erwalk import _fallback

if os.environ.get("ERWALK_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from erwalk import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "python"

gnp_dense = _impl.gnp_dense
gnp_skip = _impl.gnp_skip
walk_hits = _impl.walk_hits


def available_backends():
    backends = {"python": _fallback}
    try:
        from erwalk import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
