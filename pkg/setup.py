"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); the build therefore tolerates a missing/failed Cython toolchain
instead of aborting the install.
"""
import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "exchtest._kernels_cy",
            ["src/exchtest/_kernels_cy.pyx"],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except Exception as exc:  # noqa: BLE001 - any build-env defect falls back to pure python
    print(f"warning: compiled kernels skipped ({exc}); pure-python backend will be used",
          file=sys.stderr)

setup(ext_modules=ext_modules)
