"""Kernel backend selection.

The compiled Cython kernels are preferred when importable; otherwise the
NumPy fallback is used. Override with AQEC_BACKEND=cython|python (the
cython value fails loudly if the extension is missing, which is what you
want in benchmarks and CI).
"""

import os

from . import _py_kernels

_requested = os.environ.get("AQEC_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _py_kernels
elif _requested in ("cython", "compiled", "c"):
    from . import _kernels as _impl
elif _requested in ("python", "numpy", "py"):
    _impl = _py_kernels
else:
    raise ImportError(f"unknown AQEC_BACKEND value: {_requested!r}")

BACKEND = _impl.BACKEND_NAME

eigvalsh_herm = _impl.eigvalsh_herm
kraus_apply = _impl.kraus_apply
lindblad_rk4 = _impl.lindblad_rk4
deviation_terms = _impl.deviation_terms
