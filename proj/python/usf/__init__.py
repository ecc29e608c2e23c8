"""Uniform spanning trees and forests on finite graphs."""

from ._usf import *  # noqa: F401,F403
from ._usf import __version__, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
