"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (pure-python kernels are selected at
import time), so any failure here degrades to a source-only install. Set
THUMBCAP_NO_EXT=1 to skip the compile step entirely.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("THUMBCAP_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "thumbcap._ckern",
                    ["src/thumbcap/_ckern.pyx"],
                    # -ffp-contract=off: the fused adam kernel must round
                    # exactly like the numpy fallback (no FMA contraction)
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"thumbcap: skipping C extension build ({exc}); "
                         "pure-python kernels will be used\n")

setup(ext_modules=ext_modules)
