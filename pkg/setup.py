"""Build script: compiles the Cython flow kernel when a toolchain is available.

The package works without the extension; otaform.kernels falls back to the
pure-Python twin at import time.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/otaform/kernels/_unicycle_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        # keep arithmetic IEEE-strict so both backends agree to ~1e-15
        ext.extra_compile_args = ["-O2", "-ffp-contract=off"]
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
