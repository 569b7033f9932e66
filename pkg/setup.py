import setuptools
import metaxfer


def read_file(path):
    with open(path, 'r') as f:
        return f.read()

PACKAGE = 'metaxfer'
PACKAGE_DESC = 'Meta-level transfer learning for algorithm selection on ASlib scenarios'
VERSION = metaxfer.__version__
REQUIRED = [line.strip() for line in read_file('requirements.txt').splitlines() if line.strip()]
REQUIRED_FOR_TESTS = []

LONG_DESC = """\
Reads ASlib algorithm selection scenarios, builds normalized meta-datasets, trains a two hidden layer
neural meta-learner and transfers its hidden layers between scenarios with 0, 1 or 2 frozen layers."""

setuptools.setup(
    description=PACKAGE_DESC,
    include_package_data=True,
    package_data={'metaxfer.tests': ['data/*.arff', 'data/*/*']},
    install_requires=REQUIRED,
    long_description=LONG_DESC,
    name=PACKAGE,
    packages=['metaxfer', 'metaxfer.aslib', 'metaxfer.meta', 'metaxfer.nn', 'metaxfer.util', 'metaxfer.tests'],
    package_dir={'metaxfer': 'metaxfer'},
    entry_points={'console_scripts': ['metaxfer = metaxfer.cli:main']},
    test_suite='metaxfer.tests',
    tests_require=REQUIRED_FOR_TESTS,
    version=VERSION,
    keywords=['meta-learning', 'algorithm selection', 'aslib', 'transfer learning', 'neural network'],
    license='BSD (3-clause)',
    python_requires='>=3.7',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.7',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
)
