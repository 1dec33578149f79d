"""Weak values of nonlocal observables: packet algebra, interferometer tracing, pointer ensembles."""

from ._core import *  # noqa: F401,F403
from ._core import Error, InvalidArgument, ParseError, RegimeError  # noqa: F401

__version__ = "0.1.0"
