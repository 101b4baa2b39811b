"""Exact boson-sampling probabilities for heralded non-Gaussian input states."""
from .hafnian import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
