from setuptools import setup, find_packages


def readme():
    with open('README.md') as f:
        return f.read()


# Get version
exec(open('src/pyadiabaton/constant.py').read())

setup(
    name='pyadiabaton',
    version=version,
    description='Pulse propagation and shaping in a three-level Lambda medium '
                'under coherent population trapping',
    long_description=readme(),
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    keywords='eit cpt adiabaton maxwell schrodinger characteristics',
    license='MIT',
    python_requires='>=3.9',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'tdigest',
        'PyYAML',
        'pydantic>=2',
    ],
    tests_require=['pytest', 'pytest-mock'],
    entry_points={
        'console_scripts': ['pyadiabaton=pyadiabaton.cli:main'],
    },
    include_package_data=True,
    zip_safe=False
)
