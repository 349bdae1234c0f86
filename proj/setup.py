import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = sorted(glob.glob("src/*.cpp"))
sources.remove("src/cli_app.cpp")  # CLI11-based command front end, not needed in the wheel

ext = Pybind11Extension(
    "v2xsim._core",
    sources,
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
