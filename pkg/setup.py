"""Build the optional compiled kernels; the package works without them."""
import os

import numpy
from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if os.environ.get("GPSCURVE_NO_EXT", "") in ("", "0"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("gpscurve._kernels", ["src/gpscurve/_kernels.pyx"],
                   include_dirs=[numpy.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
