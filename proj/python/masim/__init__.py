"""Movable-subarray hybrid beamforming MU-MIMO simulator."""

from masim._core import *  # noqa: F401,F403
from masim._core import __version__  # noqa: F401
