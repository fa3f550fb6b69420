"""Pick the compiled kernels when available, else the pure-Python ones.

``LVRKIT_BACKEND=python`` forces the fallback; ``LVRKIT_BACKEND=compiled``
makes a missing extension an ImportError instead of a silent fallback.
"""
import os

from . import _kernels_py

_choice = os.environ.get("LVRKIT_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _kernels_py
        BACKEND = "python"


def get_kernels(name=None):
    """Kernel module by name ('python' or 'compiled'); default is the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    from . import _kernels  # type: ignore[attr-defined]

    return _kernels
