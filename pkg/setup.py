"""Build script for the optional compiled kernel extension.

The package is pure Python plus one Cython extension holding the hot
kernels (time-phase application and density moment accumulation). If
Cython or a C compiler is unavailable the extension is skipped and the
package falls back to the NumPy implementation at import time.
"""
from setuptools import Extension, setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "packetlab._kernels._core",
                ["src/packetlab/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=extensions)
