#!/usr/bin/env python

from setuptools import find_packages, setup

from trendforge.__version__ import VERSION

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name='trendforge',
    version=VERSION,
    description='Seasonal clothing feature mining from shop sales data',
    long_description=long_description,
    long_description_content_type="text/markdown",
    entry_points={
        'console_scripts': ['trendforge=trendforge.__main__:main']
    },
    packages=find_packages(include=['trendforge', 'trendforge.*']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'pandas>=1.5',
    ],
    extras_require={
        'test': ['pytest'],
    },
    classifiers=[
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Information Analysis',
    ],
)
