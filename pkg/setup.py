"""Builds the compiled propagation kernel when Cython and a C compiler are
available; otherwise installs the pure-Python package only."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FINIMOD_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            ["src/finimod/_bcp.pyx"],
            compiler_directives={"language_level": "3", "boundscheck": False,
                                 "wraparound": False},
            quiet=True,
        )

setup(ext_modules=ext_modules)
