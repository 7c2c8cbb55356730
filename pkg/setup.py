from setuptools import setup, find_packages

VERSION = "0.1.0"

setup(name='chcpy',
      version=VERSION,
      packages=find_packages(exclude=['examples', 'examples.*']),
      install_requires=['pandas>=1.0.5',
                        'retry>=0.9.2',
                        'psutil>=5.7.0',
                        'PyYAML>=5.3.1'],
      tests_require=['pytest'],
      setup_requires=['wheel'],
      python_requires='>=3.7',
      description='Verification of list-manipulating programs through constrained Horn clause transformation.',
      keywords=['CHC', 'Horn clauses', 'verification', 'program transformation', 'catamorphisms'],
      entry_points={
            'console_scripts': [
                  'chcpy=chcpy.cli:run',
                  'chc-verify=chcpy.cli:run_verify'
            ]
      })
