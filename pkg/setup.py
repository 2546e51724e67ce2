"""Build the optional compiled kernels.

The package works without them: ``berryoptics._backend`` falls back to the
pure-Python kernels when ``berryoptics._core`` cannot be imported.
"""
import os
import warnings

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BERRYOPTICS_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython/numpy not found, building pure-Python package only.")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "berryoptics._core",
                    ["src/berryoptics/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
