from pathlib import Path

from setuptools import find_packages, setup

excludes = (
    "*test*",
    "*local_settings*",
)


def requires(filename: str):
    return open(filename).read().splitlines()


setup(
    name="tigris_ipp",
    version=Path(__file__).parent.joinpath("tigris_ipp/version.txt").read_text().rstrip(),
    license="MIT",
    description="Informed-sampling informative path planning for fixed-wing camera platforms.",
    keywords="path planning informative sampling dubins uav search",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    python_requires=">=3.8",
    platforms=["Any"],
    packages=find_packages(exclude=excludes),
    install_requires=requires("requirements.txt"),
    extras_require={"dev": requires("dev-requirements.txt")},
    package_data={"tigris_ipp": ["version.txt"]},
    include_package_data=True,
    entry_points={
        "console_scripts": [
            "tigris = tigris_ipp.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
)
