"""Composable security checks for finite protocols.

Protocols, resources and attacks are finite column-stochastic matrices;
security is decided by linear programs over simulators.
"""

from importlib.resources import files

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file such as ``otp.csd``."""
    return files(__name__) / "data" / name
