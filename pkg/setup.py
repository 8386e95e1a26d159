import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "klab._kernel",
                    ["src/klab/_kernel.pyx"],
                    libraries=["mpfr", "gmp"],
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
