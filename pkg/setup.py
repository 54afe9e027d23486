from setuptools import setup, find_packages

setup(
    name="obliquefv_lib",
    version="0.1.0",
    packages=find_packages(include=["obliquefv_lib", "obliquefv_lib.*"]),
    install_requires=[
        "numpy>=1.20.0",
        "scipy>=1.7.0",
        "rich>=12.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.0", "hypothesis>=6.0"],
    },
    entry_points={
        "console_scripts": ["obliquefv=obliquefv_lib.cli:main_entry"],
    },
    author="Raidel Martínez Santos",
    author_email="yoshilol0526@gmail.com",
    description="Finite volume solvers for the Laplace equation with oblique derivative boundary conditions",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    url="https://github.com/yoshilol0526/obliquefv_lib",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
)
