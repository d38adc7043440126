import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HOPBOUND_SKIP_EXT", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("hopbound._simloop", ["src/hopbound/_simloop.pyx"])],
            language_level="3",
        )
    except ImportError:
        # No Cython at build time: ship pure Python, the package falls back
        # to the interpreted loop at import.
        ext_modules = []

setup(ext_modules=ext_modules)
