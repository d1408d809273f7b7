# This setup.py is used to build the pyudgrouting package.
# The environment variables you may find interesting are:
#
# PYUDGROUTING_VERSION
# if set, it will be used as the version number.
import os
import subprocess
from pathlib import Path

from setuptools import find_packages, setup

# read the contents of your README file
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text()


def get_local_version() -> str:
    try:
        git_sha = (
            subprocess.check_output(["git", "rev-parse", "HEAD"], stderr=subprocess.DEVNULL)
            .strip()
            .decode("utf-8")
        )
        return f"+git{git_sha[:7]}"
    except (FileNotFoundError, subprocess.CalledProcessError):
        return ""


def get_version() -> str:
    try:
        return os.environ["PYUDGROUTING_VERSION"]
    except KeyError:
        pass
    with open(this_directory / "version.txt") as f:
        version = f.read().strip()
    return f"{version}{get_local_version()}"


setup(
    name="pyudgrouting",
    version=get_version(),
    description="Compact headerless 1+eps routing schemes for unit disk graphs",
    long_description=long_description,
    zip_safe=False,
    python_requires=">=3.10",
    packages=find_packages(".", exclude=["tests", "tests.*"]),
    package_dir={"": "."},
    include_package_data=True,
    long_description_content_type="text/markdown",
    license="MIT",
    entry_points={
        "console_scripts": [
            "pudr=pyudgrouting.examples.main:main",
        ]
    },
    install_requires=["numpy", "scipy", "networkx", "tqdm", "platformdirs"],
    extras_require={"test": ["pytest>=6.0"], "docs": ["mkdocs-material", "mkdocstrings[python]", "mkdocs-macros-plugin"]},
)
