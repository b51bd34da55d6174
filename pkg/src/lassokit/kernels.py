"""Backend selection for the coordinate-descent kernel.

The compiled extension is used when it imports; setting LASSOKIT_PURE_PYTHON=1
forces the pure-Python implementation.
"""
import os

from . import _cd_py

BACKEND = "python"
cd_sweeps = _cd_py.cd_sweeps

if not os.environ.get("LASSOKIT_PURE_PYTHON"):
    try:
        from ._cd_ext import cd_sweeps  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass


def get_backend(name=None):
    """Return (name, cd_sweeps) for 'cython', 'python' or the default."""
    if name is None:
        return BACKEND, cd_sweeps
    if name == "python":
        return "python", _cd_py.cd_sweeps
    if name == "cython":
        from ._cd_ext import cd_sweeps as ext
        return "cython", ext
    raise ValueError(f"unknown backend {name!r}")
