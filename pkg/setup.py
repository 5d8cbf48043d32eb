import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

numpy_root = os.path.dirname(np.__file__)

openmp = os.environ.get("SSABSORB_NO_OPENMP") is None
flags = ["-O3"] + (["-fopenmp"] if openmp else [])

extensions = [
    Extension(
        "ssabsorb.mc._kernels",
        ["src/ssabsorb/mc/_kernels.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[
            os.path.join(numpy_root, "random", "lib"),
            os.path.join(numpy_root, "_core", "lib"),
        ],
        libraries=["npyrandom", "npymath"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=flags,
        extra_link_args=["-fopenmp"] if openmp else [],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
