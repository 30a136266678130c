from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "pdmse._kernels",
                ["src/pdmse/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # no Cython/numpy at build time: the package runs on the numpy fallback
    ext_modules = []

setup(ext_modules=ext_modules)
