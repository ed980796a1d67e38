import versioneer
from setuptools import setup, find_packages

setup(name='mtprep',
      version=versioneer.get_version(),
      cmdclass=versioneer.get_cmdclass(),
      license='BSD',
      packages=find_packages(exclude=['benchmarks']),
      include_package_data=True,
      package_data={'mtprep': ['mtprep.cfg']},
      description=('Parallel-corpus preparation, subword modelling and BLEU '
                   'evaluation for neural machine translation'),
      python_requires='>=3.8',
      install_requires=['docopt', 'numpy', 'regex', 'tqdm'],
      extras_require={'test': ['pytest']},
      entry_points={'console_scripts': ['mtprep = mtprep.mtprepUtils:main']}
      )
