#!/usr/bin/env python3
"""Setup script for skc - Superkmer Counter.

Metadata, dependencies and the ``skc`` console script live in
pyproject.toml; this file only declares the module layout.
"""

from setuptools import find_packages, setup

setup(
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["run_counter"],
    include_package_data=True,
    zip_safe=False,
)
