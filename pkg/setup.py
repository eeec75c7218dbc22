#!/usr/bin/env python
import sys
import os
from setuptools import setup

kw = {}

exec(open(os.path.join("crystalspectra","version.py")).read())

setup(name='crystalspectra',
      version=__release__,
      description='Spectral and scattering toolkit for Schroedinger operators on perturbed topological crystals',
      package_data={'crystalspectra': ['logging.ini', 'builtin_crystals.json']},
      packages=['crystalspectra'],
      install_requires=[
          "numpy>=1.16",
          "scipy>=1.2",
          "requests>=2.21.0",
      ],
      entry_points={
          'console_scripts': ['crystalspectra = crystalspectra.cli:main'],
      },
      **kw
     )
