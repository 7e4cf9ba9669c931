"""Build the optional compiled kernel core.

The package works without it: charsynth.kernels falls back to the numpy
implementations when the extension is absent (or when CHARSYNTH_NO_NATIVE=1).
"""

import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "charsynth.kernels._native",
        ["src/charsynth/kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": 3}))
