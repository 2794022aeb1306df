"""Build script: compiles the optional LCS kernel, falls back to pure Python.

The compiled extension is a speedup only; every code path has a pure-Python
twin selected at import time (see bioaug._kernels). Any build failure here
must therefore degrade to a source-only install instead of aborting.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"warning: building the LCS extension failed ({exc}); "
              "using the pure-Python kernel", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("warning: Cython not available; using the pure-Python LCS kernel",
              file=sys.stderr)
        return []
    return cythonize(
        [Extension("bioaug._kernels._lcs", ["src/bioaug/_kernels/_lcs.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
