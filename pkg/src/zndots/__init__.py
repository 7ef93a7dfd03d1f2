"""Dot-product sets, distance sets, k-stars and simplex types over Z_n^d."""

__version__ = "0.1.0"

from .ring_core import Modulus, factorize, is_unit, kernel_size, val_vec  # noqa: E402
from .points import PointSet, full_space, read_point_file  # noqa: E402

__all__ = [
    "Modulus",
    "PointSet",
    "factorize",
    "full_space",
    "is_unit",
    "kernel_size",
    "read_point_file",
    "val_vec",
]
