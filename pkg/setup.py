#!/usr/bin/env python3
"""Setup script to install the qmono CLI"""

from setuptools import setup

setup(
    name='qmono',
    version='1.0.0',
    description='Monomialization, local parametrization and fiber cutting of generalized power series',
    py_modules=[
        'qmono', 'gpsfile', 'reports', 'exponents', 'series', 'transforms', 'trees',
        'geometry', 'fibercut', 'vlab', 'config', 'logger', 'common', 'constants',
    ],
    install_requires=[
        'numpy>=1.24.0',
        'sympy>=1.12',
    ],
    entry_points={
        'console_scripts': [
            'qmono=qmono:main',
        ],
    },
    python_requires='>=3.8',
    license='MIT',
    author='',
)
