"""Numerical laboratory for KZ connections on Deligne-category multiplicity spaces."""
from . import algebra, braiding, connections, fock, solutions, transport

__version__ = "0.1.0"
__all__ = ["algebra", "braiding", "connections", "fock", "solutions", "transport"]
