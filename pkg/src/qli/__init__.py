"""Quantum invariants of framed links via carving-decomposition tensor contraction."""

from qli.ring import LaurentPoly

__all__ = ["LaurentPoly"]
__version__ = "0.1.0"
