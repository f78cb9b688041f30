"""Build script. The compiled matcher kernel is optional: when Cython or a C
compiler is unavailable the package installs with the pure-Python kernel only.

Set CONCEPTMINE_SKIP_CYTHON=1 to force a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CONCEPTMINE_SKIP_CYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "conceptmine._match_cy",
                    ["src/conceptmine/_match_cy.pyx"],
                    language="c++",
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
