"""Build script: compiles the optional similarity kernel extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so a failed cythonize is non-fatal.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mcpintel.similarity._kernels",
                ["src/mcpintel/similarity/_kernels.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
