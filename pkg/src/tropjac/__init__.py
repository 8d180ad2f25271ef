"""Exact tropical Jacobians, theta skeleta, W_d loci and their homology."""
from __future__ import annotations

__version__ = "0.1.0"
