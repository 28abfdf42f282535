"""Structured noncommutative realizations over matrix polyballs and
strictly contractive determinantal representations ``p = det(I - K Z_n)``."""

from .core import (BallShape, Colligation, DimensionError, DomainError, MatrixPoint, assemble_Zn,
                   random_colligation, random_point, validate)
from .evaluate import SingularPencilError, a_odot_z, det_pencil, eval_transfer, nc_coeff, x_odot_op_a
from .inversion import SingularFeedthroughError, invert
from .polynomial import DetPolySizeError, MultiPoly, det_poly, poly_eval
from .polyrep import (PipelineError, agler_reflection, pipeline_extract, stability_sample,
                      univariate_detrep, verify_detrep)
from .structure import SubspaceFamily, controllable_spaces, is_minimal, minimize, unobservable_spaces

__version__ = "0.1.0"

__all__ = [
    "BallShape", "Colligation", "DimensionError", "DomainError", "MatrixPoint", "assemble_Zn",
    "random_colligation", "random_point", "validate",
    "SingularPencilError", "a_odot_z", "det_pencil", "eval_transfer", "nc_coeff", "x_odot_op_a",
    "SingularFeedthroughError", "invert",
    "DetPolySizeError", "MultiPoly", "det_poly", "poly_eval",
    "PipelineError", "agler_reflection", "pipeline_extract", "stability_sample", "univariate_detrep",
    "verify_detrep",
    "SubspaceFamily", "controllable_spaces", "is_minimal", "minimize", "unobservable_spaces",
]
