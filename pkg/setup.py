"""Builds the optional compiled scoring kernel.

The package works without it (a pure-Python kernel is selected at import
time); Cython and a C compiler are only needed for the fast path.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "gridobs.kernels._accel",
                ["src/gridobs/kernels/_accel.pyx"],
                # -ffp-contract=off: keep strict per-operation IEEE semantics so
                # the compiled kernel is bit-identical to the pure fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
