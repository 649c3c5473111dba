import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install, kernels fall back at import
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("VOLSPEC_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "volspec._ckernels",
                ["src/volspec/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # no FMA contraction: keeps results bitwise equal to the Python twin
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
