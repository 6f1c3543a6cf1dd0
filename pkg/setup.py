import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# GRAPHSORT_NO_EXT=1 installs the pure-Python package only.
ext_modules = []
if not os.environ.get("GRAPHSORT_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "graphsort._core",
                ["src/graphsort/_core.pyx"],
                include_dirs=["src/graphsort", numpy.get_include()],
                extra_compile_args=["-O3", "-fopenmp"],
                extra_link_args=["-fopenmp"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
