"""Scalar vs. vector linear network coding over finite fields."""

from netgap.algebra import FieldCtx, MatrixGF, field_new, gf

__all__ = ["FieldCtx", "MatrixGF", "field_new", "gf"]
__version__ = "0.1.0"
