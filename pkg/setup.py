"""Build script: compiles the Legendre/Christoffel kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so compilation failures only cost speed, not features.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    # -ffp-contract=off keeps the compiled kernels bit-identical to the
    # numpy fallback (no fused multiply-add contraction).
    ext_modules = cythonize(
        ["src/riscoupling/_legendre_cy.pyx"],
        language_level=3,
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O2", "-ffp-contract=off"]
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
