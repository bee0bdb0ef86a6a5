#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages


requirements = [
    'numpy',
    'pandas',
    'scipy'
]

test_requirements = []


long_desc = """
Numerical lab for semigroups of composition operators on weighted Hardy
spaces of the unit disc and the right half-plane.
"""


setup(
    name='pySemiflowLab',
    version='0.1.0',
    description='Numerical lab for composition-operator semigroups',
    long_description=long_desc,
    author="pySemiflowLab developers",
    entry_points={
        'console_scripts': [
            'pySemiflowLab = pySemiflowLab.__main__:main'
        ]
    },
    packages=find_packages(exclude=['tests']),
    package_dir={'pySemiflowLab':
                 'pySemiflowLab'},
    package_data={'pySemiflowLab': ['database/*.json']},
    include_package_data=True,
    install_requires=requirements,
    license="MIT license",
    zip_safe=False,
    keywords='pySemiflowLab',
    classifiers=[
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    test_suite='tests',
    tests_require=test_requirements
)
