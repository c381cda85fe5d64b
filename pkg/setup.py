from setuptools import setup, find_packages

setup(
    name="photon-dimer",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=1.5.2",
    ],
    entry_points={
        "console_scripts": [
            "photon-dimer=src.main:main",
        ],
    },
    description="Few-photon scattering off a waveguide-coupled Bose-Hubbard cavity dimer",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.8",
)
