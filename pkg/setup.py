"""Build script: compiles the optional ray-cast kernel extension.

The package works without the extension (a pure-Python kernel is selected at
import time), so any failure here degrades to a source-only install instead of
aborting.  Build in place for development with:

    python3 setup.py build_ext --inplace
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "racil.geom._kernel",
                ["src/racil/geom/_kernel.pyx"],
                # -ffp-contract=off: no FMA contraction, so the compiled kernel
                # is bit-identical to the pure-Python fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"warning: ray-cast extension not built ({exc}); using pure-Python kernel")
    ext_modules = []

setup(ext_modules=ext_modules)
