import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "nilcyl._speedup",
                ["src/nilcyl/_speedup.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    # pure-Python install; nilcyl.kernels falls back to the numpy reference
    ext_modules = []

setup(ext_modules=ext_modules)
