"""Build hooks for the optional compiled search kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the Cython module only accelerates the
sequence-search inner loops.  The extension is marked ``optional`` so a
missing compiler degrades to the pure build instead of failing the install.
Set ``FTWALK_NO_EXT=1`` to skip the extension entirely.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("FTWALK_NO_EXT") == "1":
        return []
    if not os.path.exists("src/ftwalk/_seqkernel.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "ftwalk._seqkernel",
        ["src/ftwalk/_seqkernel.pyx"],
        language="c++",
        extra_compile_args=["-O3", "-std=c++17"],
        optional=True,
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
