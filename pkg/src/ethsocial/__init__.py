"""Detect and reproduce social engineering attack patterns in Ethereum contracts"""

import importlib_metadata

try:
    __version__ = importlib_metadata.version("ethsocial")
except importlib_metadata.PackageNotFoundError:
    __version__ = "0.0.0"
