"""Setup script for the multiaccess package."""

from setuptools import setup, find_packages

# Read README with explicit UTF-8 encoding
with open("README.md", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="multiaccess",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "python-dotenv",
        "structlog",
        "pyyaml",
        "pydantic>=2.6.0",
        "numpy>=1.26.2",
        "pandas>=2.1.3",
        "rich>=13.7.0",
    ],
    entry_points={
        "console_scripts": ["multiaccess=src.main:main"],
    },
    python_requires=">=3.9",
    description="Steady-state analysis of multi-channel multiple-access systems",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
