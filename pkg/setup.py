import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-python install; expiso.kernels falls back to numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("expiso._kernels", ["src/expiso/_kernels.pyx"],
                   include_dirs=[numpy.get_include()],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
