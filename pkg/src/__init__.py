"""
kappa-psi - Exact Intersection Numbers Package

This package contains the modules of the mixed psi/kappa calculator:
- cli: command-line front end
- config: Configuration and settings management
- database: memo caches and the persisted cache file
- models: Pydantic data models and schemas
- services: correlator engines, constants, volumes and verification
- utils: exact arithmetic, multi-indices and sparse polynomials
"""

__version__ = "1.0.0"
