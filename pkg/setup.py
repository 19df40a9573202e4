"""Build the optional compiled path-consistency kernel.

A missing compiler or Cython only loses the speedup: the package falls back
to the pure-Python kernel at import time.
"""
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernel not built ({exc}); using pure Python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} not built ({exc}); using pure Python")


if cythonize is not None:
    ext_modules = cythonize(
        [Extension("stal.spatial._pc_kernel", ["src/stal/spatial/_pc_kernel.pyx"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
