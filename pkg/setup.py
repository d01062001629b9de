"""Build script: compiles the optional Cython evaluation kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a failed compilation is downgraded to a warning.
"""

import warnings

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "echolab._kernels._fastwave",
                ["src/echolab/_kernels/_fastwave.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -fno-math-errno lets gcc vectorize the sin/cos loops with
                # libmvec without the value-changing parts of -ffast-math
                extra_compile_args=["-O3", "-fno-math-errno", "-ftree-vectorize"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"building without compiled kernels: {exc}")
    ext_modules = []

setup(ext_modules=ext_modules)
