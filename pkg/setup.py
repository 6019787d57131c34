#!/usr/bin/env python

from setuptools import setup, find_packages

version = dict()
with open('fuzzyfluid/_version.py') as version_file:
    exec(version_file.read(), version)

setup(name='fuzzyfluid',
      version=version['__version__'],
      description='ideal fluid dynamics in Clebsch variables, with momenta '
                  'on SU(2) and a tunable short-distance cutoff',
      long_description='ideal fluid dynamics in Clebsch variables, with momenta '
                       'on SU(2) and a tunable short-distance cutoff; fuzzyfluid',
      packages=find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"]),
      python_requires='>=3.8',
      install_requires=['numpy',
                        'scipy',
                        'setuptools'],
      classifiers=[
          'Intended Audience :: Science/Research',
          'Programming Language :: Python',
          'Topic :: Scientific/Engineering :: Physics',
          'Operating System :: POSIX',
          'Operating System :: Unix',
          'Operating System :: MacOS',
          'Programming Language :: Python :: 3.8',
          'Programming Language :: Python :: 3.9',
          'Programming Language :: Python :: 3.10',
          ],
      entry_points={
          "console_scripts": [
              "fuzzyfluid=fuzzyfluid.__fuzzyfluid__:main",
              ]
          }

      )
