"""Selection of the path kernels: the compiled extension, else pure Python.

Setting SSABSORB_PURE_PYTHON to a non-empty value forces the fallback.
"""

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def backend(name=None):
    """The kernel module: ``name`` is "compiled", "python" or None (automatic)."""
    if name is None:
        name = "python" if os.environ.get("SSABSORB_PURE_PYTHON") else "compiled"
    if name == "python":
        return _fallback
    if name == "compiled":
        return _compiled if _compiled is not None else _fallback
    raise ValueError(f"unknown backend {name!r}")


def compiled_available():
    return _compiled is not None
