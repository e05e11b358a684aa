"""Build script: compiles the optional counting kernels.

The compiled extension is a performance add-on only.  If Cython or a C
compiler is unavailable the install still succeeds and hyperdp.kernels
falls back to the pure-numpy implementation at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: skipping {ext.name} ({exc})")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hyperdp._kernels",
                ["src/hyperdp/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
