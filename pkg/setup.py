"""Build the optional Cython kernels.

The package works without them: ``hedgekit.kernels`` falls back to the pure
Python implementation when ``hedgekit._ckernels`` cannot be imported.  Set
``HEDGEKIT_NO_EXT=1`` to skip compilation entirely.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HEDGEKIT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "hedgekit._ckernels",
                    ["src/hedgekit/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no FMA contraction and no sin+cos -> sincos fusion: results must match
                    # the Python fallback bit for bit
                    extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
