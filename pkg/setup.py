"""Build script for the optional compiled kernels.

The package works without the extension; kernels.py falls back to the pure
Python implementation when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    extensions = [
        Extension(
            "tightpack._fastkernels",
            ["src/tightpack/_fastkernels.pyx"],
            # -ffp-contract=off keeps float results bit-identical with the
            # pure Python twin (no fused multiply-add).
            extra_compile_args=["-O2", "-ffp-contract=off"],
        )
    ]
    ext_modules = cythonize(extensions, language_level=3)

setup(ext_modules=ext_modules)
