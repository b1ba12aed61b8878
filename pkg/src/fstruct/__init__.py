"""Invariant f-structures on homogeneous reductive spaces with three isotropy modules."""

__version__ = "0.1.0"

from fstruct.kernels import BACKEND  # noqa: E402
from fstruct.scalars import EPS, Mat, Scalar, bracket, trace_form  # noqa: E402
from fstruct.spaces import (  # noqa: E402
    MVector, ReductiveSpace, bracket_m, equivariant_maps, project, verify_assumption1,
)
from fstruct.foperator import FOperator, Shape, block_f, classify_shape  # noqa: E402
from fstruct.connection import (  # noqa: E402
    Metric, Region, classify, composition_tensor, cross_validate, nabla, predicate_direct,
    theorem_classify, u_closed, u_oracle,
)
from fstruct.registry import build_space, parse_space, registered_instances  # noqa: E402
from fstruct.library import builtin_f  # noqa: E402

__all__ = [
    "BACKEND", "EPS", "FOperator", "MVector", "Mat", "Metric", "ReductiveSpace", "Region", "Scalar",
    "Shape", "block_f", "bracket", "bracket_m", "build_space", "builtin_f", "classify",
    "classify_shape", "composition_tensor", "cross_validate", "equivariant_maps", "nabla",
    "parse_space", "predicate_direct", "project", "registered_instances", "theorem_classify",
    "trace_form", "u_closed", "u_oracle", "verify_assumption1",
]
