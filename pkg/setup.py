"""A setuptools based setup module.

See:
https://packaging.python.org/en/latest/distributing.html
https://github.com/pypa/sampleproject
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

from equilibria import __version__

# Get the long description from the README file
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

with open(path.join(here, 'requirements.txt')) as f:
    requirements = f.read().splitlines()

setup(
    name='scipion-em-equilibria',  # Required
    version=__version__,  # Required
    description='Competitive equilibria of unit-demand markets with '
                'general utilities, as a library, a CLI and a Scipion plugin.',  # Required
    long_description=long_description,  # Optional
    url='https://github.com/scipion-em/scipion-em-equilibria',  # Optional
    author='scipion-em-equilibria contributors',  # Optional
    keywords='scipion matching-markets competitive-equilibrium auctions scipion-3.0',  # Optional
    packages=find_packages(),
    install_requires=requirements,
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={
        'pyworkflow.plugin': 'equilibria = equilibria',
        'console_scripts': 'equilibria = equilibria.cli:main',
    },
    package_data={  # Optional
       'equilibria': ['conda.yaml'],
    }
)
