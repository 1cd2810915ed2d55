import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "spineforge._kernels_cy",
                ["src/spineforge/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # building without Cython is allowed; the package falls back to the
    # pure-Python kernels at import time
    ext_modules = []

setup(ext_modules=ext_modules)
