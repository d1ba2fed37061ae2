import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the fallback kernels are used
    cythonize = None

# -ffp-contract=off: fused multiply-add would change rounding and break the
# bit-for-bit agreement with the pure-Python kernels.
extra = ["-O3", "-ffp-contract=off"]

ext_modules = []
if cythonize is not None and not os.environ.get("ERGOCOUNT_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "ergocount._core",
                ["src/ergocount/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=extra,
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
