"""A certifying verifier for a small annotated C subset."""

__version__ = "0.1.0"
