"""Build script: compiles the fast stepping kernel when a toolchain is present.

The package works without the extension (a pure-Python engine is selected at
import time), so failures here degrade gracefully instead of aborting the
install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/fowtfd/plant/_engine.pyx",
        language_level="3",
        # FMA contraction would break bit-level parity with the pure-Python
        # engine, which the test suite asserts.
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O2", "-ffp-contract=off"]
except Exception as exc:  # pragma: no cover - toolchain-dependent
    print(f"fowtfd: skipping compiled kernel ({exc}); pure-Python engine will be used")

setup(ext_modules=ext_modules)
