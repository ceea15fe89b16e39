"""Build script for the optional libmpc theta kernel.

The extension links against the GMP/MPFR/MPC copies bundled with gmpy2 so
that gmpy2 objects and the kernel share one allocator. If anything about the
build fails, installation continues and the pure-Python kernel is used.
"""
import glob
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _gmpy2_extension():
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    pkg_dir = os.path.dirname(gmpy2.__file__)
    libs_dir = os.path.join(os.path.dirname(pkg_dir), "gmpy2.libs")
    shared = []
    for stem in ("libmpc", "libmpfr", "libgmp"):
        found = sorted(glob.glob(os.path.join(libs_dir, stem + "-*.so*")))
        if not found:
            return []
        shared.append(found[0])
    ext = Extension(
        "witten_rigidity.theta._product",
        sources=["src/witten_rigidity/theta/_product.pyx"],
        include_dirs=[pkg_dir],
        extra_compile_args=["-O2"],
        extra_link_args=shared + [f"-Wl,-rpath,{libs_dir}"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3}, quiet=True)


class OptionalBuildExt(build_ext):
    """Treat a failed kernel build as a warning, not an error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled theta kernel not built ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: could not build {ext.name} ({exc})", file=sys.stderr)


setup(ext_modules=_gmpy2_extension(), cmdclass={"build_ext": OptionalBuildExt})
