"""Finite and mesh-discretized Lorentzian spaces, Cauchy sets and the d_J metric."""

from .causal import (
    CausalityLevel,
    FiniteLorentzianSpace,
    chain_space,
    compute_boundaries,
    maximal_causal_relation,
    minkowski_space,
    random_weighted_poset,
    verify_causality_level,
    verify_distinguishing,
)
from .cauchy import CauchyGraph, random_strong_graph, validate_graph, weakly_timelike_intercepting
from .curves import DiscreteCausalCurve, crossing_count, inextendibility_check
from .dj import blaschke_net, dj_matrix, dj_set, limit_of_cauchy_sequence, verify_metric_axioms
from .errors import InputError, InvariantError, LorentzError, PreconditionError
from .mesh import HyperbolicMesh, IntrinsicDistanceOracle, build_annulus_mesh, build_disk_mesh
from .models import ConeModel, FiniteModel, MinkowskiModel, StripModel, cone_distance
from .timefn import build_time_function, verify_level_crossing

__all__ = [
    "CausalityLevel",
    "CauchyGraph",
    "ConeModel",
    "DiscreteCausalCurve",
    "FiniteLorentzianSpace",
    "FiniteModel",
    "HyperbolicMesh",
    "InputError",
    "IntrinsicDistanceOracle",
    "InvariantError",
    "LorentzError",
    "MinkowskiModel",
    "PreconditionError",
    "StripModel",
    "blaschke_net",
    "build_annulus_mesh",
    "build_disk_mesh",
    "build_time_function",
    "chain_space",
    "compute_boundaries",
    "cone_distance",
    "crossing_count",
    "dj_matrix",
    "dj_set",
    "inextendibility_check",
    "limit_of_cauchy_sequence",
    "maximal_causal_relation",
    "minkowski_space",
    "random_strong_graph",
    "random_weighted_poset",
    "validate_graph",
    "verify_causality_level",
    "verify_distinguishing",
    "verify_level_crossing",
    "verify_metric_axioms",
    "weakly_timelike_intercepting",
]
