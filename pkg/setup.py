"""Build the optional Cython kernels.

If the extension fails to compile the package still installs; the
pure-Python kernels are used instead (see ``airfoilgan.kernels``).
"""
import os

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: C kernels not built ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: failed to build {ext.name} ({exc})")


def extensions():
    if os.environ.get("AIRFOILGAN_NO_EXT"):
        return []
    from Cython.Build import cythonize

    ext = Extension(
        "airfoilgan._ckernels",
        ["src/airfoilgan/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
