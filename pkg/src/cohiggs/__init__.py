"""Exact computations for co-Higgs bundles on the projective line."""

__version__ = "0.1.0"
