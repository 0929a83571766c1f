from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("mpfjss._dl_core", ["src/mpfjss/_dl_core.pyx"], language="c++")],
        language_level=3,
    )

setup(ext_modules=ext_modules)
