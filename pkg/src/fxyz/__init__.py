"""Fused elliptic R-matrices, the higher-spin XYZ chain and its Bethe equations."""

from .chain import ChainParams
from .elliptic import EllipticParams

__version__ = "0.1.0"

__all__ = ["ChainParams", "EllipticParams", "__version__"]
