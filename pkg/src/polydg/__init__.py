"""Interior penalty discontinuous Galerkin methods on general polygonal meshes."""
from .analysis import ErrorTriple, errors, fit_rates, inverse_constant, penalty_threshold
from .assembly import DGParams, SparseSystem, apply_bilinear, assemble
from .estimator import IPDGPoisson, L2Projector
from .mesh import Mesh, MeshError, audit_shape, build_mesh, generate_dual_hex, generate_hybrid
from .poly_space import DiscreteFunction, l2_project
from .solver import NotPositiveDefiniteError, solve

__version__ = "0.1.0"

__all__ = [
    "DGParams",
    "DiscreteFunction",
    "ErrorTriple",
    "IPDGPoisson",
    "L2Projector",
    "Mesh",
    "MeshError",
    "NotPositiveDefiniteError",
    "SparseSystem",
    "apply_bilinear",
    "assemble",
    "audit_shape",
    "build_mesh",
    "errors",
    "fit_rates",
    "generate_dual_hex",
    "generate_hybrid",
    "inverse_constant",
    "l2_project",
    "penalty_threshold",
    "solve",
]
