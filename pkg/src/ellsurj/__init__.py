"""Executable effective surjectivity for mod-ell images of products of elliptic curves."""

__version__ = "0.1.0"
