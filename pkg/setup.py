from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "eelwrist._ckernel",
                ["src/eelwrist/_ckernel.pyx"],
                extra_compile_args=["-O3"],
                optional=True,  # pure-Python kernel takes over if this fails
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
