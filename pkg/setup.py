"""Build script for the optional compiled kernel.

The package works without the extension (a pure-Python kernel is selected at
import time); when Cython and a C compiler are available the hot tuple-join
kernel is compiled as kgpattern._ckernels. Set KGP_NO_EXT=1 to skip it.
"""
import os
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a soft warning, not an install error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure falls back
            warnings.warn(f"skipping compiled kernel ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"skipping {ext.name} ({exc}); using pure-Python fallback")


ext_modules = []
if os.environ.get("KGP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("kgpattern._ckernels", ["src/kgpattern/_ckernels.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
