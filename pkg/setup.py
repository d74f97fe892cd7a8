"""
Installs the bornstat package and its ``bornstat`` console command.
"""
from setuptools import setup

# Runtime requirements; test and docs extras live in requirements.txt
INSTALL_REQUIRES = ["numpy >= 1.17",
                    "scipy >= 1.4",
                    "Mako ~= 1.1"]

setup(name="bornstat",
      version="1.0.0",
      description="Born-rule statistics of dynamical quantum phase "
                  "transitions in the transverse-field Ising chain",
      packages=["bornstat"],
      package_data={"bornstat": ["templates/*.mako"]},
      python_requires=">=3.9",
      install_requires=INSTALL_REQUIRES,
      extras_require={"test": ["termcolor >= 1.1", "hypothesis >= 5.0"]},
      entry_points={"console_scripts": ["bornstat = bornstat.bornstat_cli:main"]})
