"""Build the optional compiled kernels.

The Cython extension is marked optional: if it cannot be compiled the
package still installs and falls back to the numpy implementations.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ampshare._kernels",
                ["src/ampshare/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
