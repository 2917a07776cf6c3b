"""Desk-scale completions of sampled Randers spaces and the causal
boundary of the stationary spacetimes they generate."""

from .extreal import INF, ExtendedNonNeg
from .fieldexpr import FieldDomainError, FieldParseError, eval_field, parse_field
from .graph import BuildError, SampledSpace, SpaceSpec, build_graph, shortest_distance
from .metric import (AxiomReport, DistanceOracle, ball_membership,
                     check_generalized_axioms, reverse, symmetrize)
from .randers import PositivityError, RandersData, randers_norm, segment_length
from .spaces import BUILDERS, build_example

__all__ = [
    "INF", "ExtendedNonNeg",
    "FieldDomainError", "FieldParseError", "eval_field", "parse_field",
    "BuildError", "SampledSpace", "SpaceSpec", "build_graph", "shortest_distance",
    "AxiomReport", "DistanceOracle", "ball_membership",
    "check_generalized_axioms", "reverse", "symmetrize",
    "PositivityError", "RandersData", "randers_norm", "segment_length",
    "BUILDERS", "build_example",
]
