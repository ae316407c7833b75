"""Regional lexical variation from geotagged text."""

from ._lexreg import *  # noqa: F401,F403
from ._lexreg import __version__  # noqa: F401
