"""Price-setting newsvendor with mean-variance asset hedging."""

from ._nvhedge import *  # noqa: F401,F403
from ._nvhedge import Error

__all__ = [name for name in dir() if not name.startswith("_")]
