"""Kernel backend selection.

The compiled extension is used when importable. Setting ``VOLSPEC_BACKEND``
to ``python`` forces the pure-Python fallback; ``cython`` makes a missing
extension an import error instead of a silent fallback.
"""

import os

_choice = os.environ.get("VOLSPEC_BACKEND", "auto").lower()

if _choice == "python":
    from volspec import _pykernels as kernels
elif _choice == "cython":
    from volspec import _ckernels as kernels
else:
    try:
        from volspec import _ckernels as kernels
    except ImportError:  # extension not built
        from volspec import _pykernels as kernels

BACKEND = "cython" if kernels.__name__.endswith("_ckernels") else "python"


def get_kernels(name=None):
    """Return a kernel module by name (``"cython"``/``"python"``), default the active one."""
    if name is None:
        return kernels
    if name == "python":
        from volspec import _pykernels

        return _pykernels
    if name == "cython":
        from volspec import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
