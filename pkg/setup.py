"""Build script: compiles the evaluation kernel when Cython is available.

The package works without the extension (a pure-Python interpreter with
identical semantics is selected at import time), so a failed or skipped
extension build only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("odecubic._kernel", ["src/odecubic/_kernel.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
