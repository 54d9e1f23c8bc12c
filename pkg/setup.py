"""Build script: compiles the optional oscillatory-sum extension.

If the C toolchain or Cython is unavailable the package still installs;
`fiolab.backend` then falls back to the pure-numpy kernels.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fiolab._core",
                ["src/fiolab/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on toolchain
    sys.stderr.write("fiolab: skipping compiled core (%s)\n" % exc)

setup(ext_modules=ext_modules)
