"""Build script for the optional compiled kernels.

The package is fully functional without the extension: advdens._kernels
falls back to the NumPy reference implementation when the compiled module
is missing (see benchmarks/bench_kernels.py for the speed comparison).
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    ext = Extension(
        "advdens._kernels._fastk",
        ["src/advdens/_kernels/_fastk.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    extensions = cythonize([ext], language_level=3)

setup(ext_modules=extensions)
