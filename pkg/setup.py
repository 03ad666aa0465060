#!/usr/bin/env python3
from setuptools import setup

import setuptools_scm

setup()
