"""Build shim for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so the extension is marked optional and a failed compile does
not abort installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    ext = Extension(
        "aqec._core._kernels",
        sources=["src/aqec/_core/_kernels.pyx"],
        optional=True,
        # fast-math: plain 4-mult complex products (no __muldc3 calls) and
        # vectorizable reductions; inputs are validated finite upstream
        extra_compile_args=["-O3", "-ffast-math", "-fno-math-errno"],
    )
    extensions = cythonize(
        [ext],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=extensions)
