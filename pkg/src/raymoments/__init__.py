"""Momentum ray transforms of symmetric tensor fields.

Numerical laboratory for the range theory of momentum ray transforms:
exact transforms of polynomial-Gaussian fields, homogeneous extension of
line data, John-operator range conditions, the rank-reduction that
recovers lower-order data from the top-order extension, planar moment
conditions, and the exact operator algebra behind the identities.
"""

__version__ = "0.1.0"

from .gaussfield import GaussField, GaussTerm, inner_derivative, random_field
from .symtensor import SymTensor, coefficient_a, coefficient_c, contract_direction, dimension, symmetrize
from .xray import TSPoint, TransformRep, momentum_transform, random_ts_points, ray_transform_I

__all__ = [
    "GaussField",
    "GaussTerm",
    "SymTensor",
    "TSPoint",
    "TransformRep",
    "coefficient_a",
    "coefficient_c",
    "contract_direction",
    "dimension",
    "inner_derivative",
    "momentum_transform",
    "random_field",
    "random_ts_points",
    "ray_transform_I",
    "symmetrize",
]
