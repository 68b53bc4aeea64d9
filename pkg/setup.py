"""Build script: compiles the optional Cython conv kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import), so a missing compiler or Cython only costs speed.
Set LABELDIFF_REQUIRE_CYTHON=1 to turn a failed extension build into an error.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

REQUIRE = os.environ.get("LABELDIFF_REQUIRE_CYTHON", "") == "1"


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            if REQUIRE:
                raise
            warnings.warn(f"building Cython kernels failed ({exc}); "
                          "falling back to the pure-numpy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            if REQUIRE:
                raise
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-numpy backend")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        if REQUIRE:
            raise
        warnings.warn(f"Cython/numpy unavailable at build time ({exc}); "
                      "skipping compiled kernels")
        return []
    ext = Extension(
        "labeldiff.kernels._convops",
        ["src/labeldiff/kernels/_convops.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
