"""Builds the optional compiled kernel; the package works without it."""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            warnings.warn(f"compiled kernel not built, using the Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name}, using the Python fallback: {exc}")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython or numpy unavailable; skipping the compiled kernel")
        return []
    ext = Extension(
        "packcover._kernel",
        ["src/packcover/_kernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # no -ffast-math and no FMA contraction: the fallback must match bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
