"""Pseudospectral radial 3D defocusing NLKG simulator with I-method diagnostics."""

__version__ = "1.0.0"
