"""qdlab: anyon-permutation circuits for quantum double models with exact verification."""

__version__ = "0.1.0"
