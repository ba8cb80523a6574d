"""Build script for the optional compiled core.

The package is fully functional without the extension (a NumPy/SciPy
fallback is selected at import time); the extension fuses the per-interval
re-diagonalization loop used by the dynamic-noise ensembles.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "spinwire._core",
                sources=["src/spinwire/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # No Cython available: ship the pure-Python package only.
    ext_modules = []

setup(ext_modules=ext_modules)
