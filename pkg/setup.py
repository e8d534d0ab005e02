"""
Installer for the qforecast package

:author:  qforecast developers
:version: October 17, 2026
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

# Get the long description from the README file
here = path.abspath(path.dirname(__file__))
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()


setup(
    name='qforecast',  # Required

    # Keep in step with qforecast.__version__ and CHANGES.md
    version='1.0.1',      # Required

    description='Hybrid quantum-classical traffic flow forecasting on a numpy simulator',  # Required

    long_description=long_description,  # Optional
    long_description_content_type='text/markdown',  # Optional (see note above)

    author='qforecast developers',  # Optional

    # Classifiers help users find your project by categorizing it.
    #
    # For a list of valid classifiers, see https://pypi.org/classifiers/
    classifiers=[  # Optional
        'Development Status :: 4 - Beta',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Scientific/Engineering :: Physics',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],

    # Note that this is a string of words separated by whitespace, not a list.
    keywords='quantum machine-learning lstm time-series forecasting traffic',  # Optional

    packages=find_packages(exclude=("tests",)),  # Required
    python_requires='>=3.8',

    # numpy does every array computation; scipy supplies the logistic function
    # and the rank correlation of the consistency check.
    install_requires=['numpy', 'scipy'],  # Optional

    # The figures are optional. Install them with
    #
    #   $ pip install qforecast[plot]
    extras_require={  # Optional
        'plot': ['matplotlib'],
    },

    # The command line tool
    entry_points={  # Optional
        'console_scripts': [
            'qforecast=qforecast.cli:main',
        ],
    },
)
