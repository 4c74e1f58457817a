"""Synthesis and verification toolkit for saturated switched linear systems."""

from satsw._core import *  # noqa: F401,F403
from satsw._core import __doc__  # noqa: F401
