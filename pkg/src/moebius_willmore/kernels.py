"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``MOEBIUS_WILLMORE_PURE_PYTHON=1`` is set, the numpy
implementation is used.  Both expose the same functions.
"""

import os

from . import _kernels_py

if os.environ.get("MOEBIUS_WILLMORE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
quad_betas = _impl.quad_betas
edge_betas = _impl.edge_betas
willmore_energy = _impl.willmore_energy
fd_gradient = _impl.fd_gradient

__all__ = ["BACKEND", "quad_betas", "edge_betas", "willmore_energy", "fd_gradient", "python_backend"]


def python_backend():
    return _kernels_py
