"""LASA handwriting MAT-file to demonstration-JSON converter."""

from .converter import LasaShape, SchemaError, convert, read_lasa_mat

__all__ = ["LasaShape", "SchemaError", "convert", "read_lasa_mat"]
