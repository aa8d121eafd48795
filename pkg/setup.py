import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class optional_build_ext(build_ext):
    """Build the accelerator if possible, fall back to pure Python if not."""

    def run(self):
        try:
            build_ext.run(self)
        except (PlatformError, FileNotFoundError):
            self._skip("build_ext failed, no compiled kernels")

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except (CCompilerError, ExecError, OSError):
            self._skip("compiling %s failed, no compiled kernels" % ext.name)

    def _skip(self, note):
        print("WARNING: %s (pure-Python fallback will be used)" % note,
              file=sys.stderr)


def extensions():
    if os.environ.get("LOCINT_NO_EXT"):
        return []
    pyx = os.path.join("src", "locint", "_ckernels.pyx")
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("locint._ckernels", [pyx])],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
