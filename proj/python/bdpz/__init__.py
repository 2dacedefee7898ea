"""Ergodicity, concentration and truncation bounds for bilateral birth-death processes."""

from ._bdpz import *  # noqa: F401,F403
from ._bdpz import __doc__  # noqa: F401
