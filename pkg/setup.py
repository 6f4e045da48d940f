"""Build hook for the optional Cython kernels.

If Cython or a C compiler is missing the package still installs; the
pure-Python kernels take over at import time.
"""

import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MFGENS_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mfgens._kernels",
                    ["src/mfgens/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
