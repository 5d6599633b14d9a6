"""
Configuration package for the kappa-psi calculator.
"""

__version__ = "1.0.0"
