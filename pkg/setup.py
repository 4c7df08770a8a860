"""Build script: compiles the optional message-passing extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the AP inner loop faster.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext = Extension(
        "gapclust._mp",
        sources=["src/gapclust/_mp.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # -ffp-contract=off keeps the compiled kernels bit-identical to the
        # NumPy fallback (no FMA contraction of a*x + b*y).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
