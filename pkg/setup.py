"""
Defines packaging information.
"""
from setuptools import find_packages, setup

setup(
    name="qubodualbounds",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=["numpy>=1.26", "scipy>=1.11", "pandas>=2.2.0", "tabulate>=0.9.0"],
    entry_points={"console_scripts": ["qubodualbounds = qubodualbounds.cli:main"]},
    license="MIT",
    description="QUBO dual bounds by plane projection, with a warmstarted branch-and-bound.",
)
