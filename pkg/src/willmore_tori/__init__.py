"""Willmore energy of Mobius-transformed Clifford tori in curved 3-manifolds."""

__version__ = "0.1.0"
