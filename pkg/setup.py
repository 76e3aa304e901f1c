from setuptools import Extension, setup

# The compiled kernel is optional: flagcone._kernel falls back to the pure
# Python implementation when the extension is absent.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "flagcone._ddcore",
                ["src/flagcone/_ddcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
