# https://setuptools.readthedocs.io/en/latest/userguide/quickstart.html#development-mode
import setuptools

setuptools.setup()
