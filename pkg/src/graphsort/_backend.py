"""Pick the kernel implementation at import time.

The compiled core is used when it imports cleanly; setting
``GRAPHSORT_PURE=1`` forces the pure-Python kernels.
"""

import os

from . import _pykernels

kernels = _pykernels
BACKEND = "python"

if not os.environ.get("GRAPHSORT_PURE"):
    try:
        from . import _core
    except ImportError:
        pass
    else:
        kernels = _core
        BACKEND = "cython"


def use(name):
    """Switch backend at runtime (``"python"`` or ``"cython"``); for benchmarks and tests."""
    global kernels, BACKEND
    if name == "python":
        kernels, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _core

        kernels, BACKEND = _core, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")


def get(name=None):
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    from . import _core

    return _core


def compiled_available():
    try:
        from . import _core  # noqa: F401
    except ImportError:
        return False
    return True
