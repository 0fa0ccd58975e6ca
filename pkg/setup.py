"""Build script: compiles the Monte-Carlo kernel extension when possible.

The extension is optional.  If Cython or a C compiler is unavailable the
install falls back to the pure-NumPy kernel (selected at import time in
``madkit._kernel``).
"""
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if we can; warn and continue if we cannot."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"madkit._madcore not built ({exc}); using NumPy kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"madkit._madcore not built ({exc}); using NumPy kernel")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "madkit._madcore",
                ["src/madkit/_madcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
