import os.path
from setuptools import find_packages, setup


def get_version():
    version_file = os.path.join(os.path.dirname(__file__), "colorcount", "version.py")

    with open(version_file, "r") as f:
        raw = f.read()

    items = {}
    exec(raw, None, items)

    return items["__version__"]


def get_long_description():
    with open("README.md", "r") as fd:
        long_description = fd.read()

    return long_description


setup(
    name="colorcount",
    version=get_version(),
    author="colorcount developers",
    description="Approximate coloured range counting and box stabbing counting.",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    license="MIT",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "lmfit",
        "numpy",
        "pandas",
        "tqdm",
    ],
    entry_points={
        "console_scripts": [
            "colorcount-bench = colorcount.apps.bench:main",
        ],
    },
    extras_require={
        "develop": [
            "black",
            "hypothesis",
            "pytest",
            "pytest-cov",
        ],
        "docs": ["myst-parser", "sphinx", "sphinx_rtd_theme"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    zip_safe=False,
)
