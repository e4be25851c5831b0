from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "proxysieve.kernels._ckernels",
                ["src/proxysieve/kernels/_ckernels.pyx"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
else:
    # Pure-Python install still works; the slower fallback kernels are used.
    extensions = []

setup(ext_modules=extensions)
