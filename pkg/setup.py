"""Build the optional Cython kernel; the package falls back to pure Python
when the extension is missing."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("LASSOKIT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension(
                "lassokit._cd_ext",
                sources=["src/lassokit/_cd_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            compiler_directives={
                "language_level": 3, "boundscheck": False,
                "wraparound": False, "cdivision": True,
                "initializedcheck": False})

setup(ext_modules=ext_modules)
