"""Build script for the optional compiled kernel.

The package works without the extension (a numpy fallback is selected at
import time); the extension just makes the hot Green's-function evaluation
loop faster.  ``optional=True`` keeps installs working on boxes without a
C toolchain.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "convfactor._green_kernel",
        ["src/convfactor/_green_kernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
