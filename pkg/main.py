#!/usr/bin/env python3
"""
kappa-psi - exact mixed psi/kappa intersection numbers.
Main application entry point.
"""
import sys

from src.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
