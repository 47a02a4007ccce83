"""Numerical checks for an n-local isomorphism between one real chiral fermion and n chiral fermions."""
from .core import HalfInt, ModeIndex, Sector
from .fock import FockSpace
from .poly import ModePolynomial

__all__ = ["HalfInt", "ModeIndex", "Sector", "FockSpace", "ModePolynomial"]
__version__ = "0.1.0"
