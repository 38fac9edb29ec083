"""Exact why / why-not explanations for small ReLU networks.

The package decomposes a feed-forward ReLU classifier into the convex
polytopes on which it is affine, and answers two questions about a
prediction in terms of the half-space constraints of those polytopes:

* why was class c chosen here — a minimal set of linear inequalities
  that is exactly the set of inputs classified like this one, and
* why not class c' — a nearest activation-region change (or an on-the-spot
  dominance argument) after which c' would win.
"""

from .model import (
    ActivationSignature,
    DomainError,
    FormatError,
    Layer,
    ModelError,
    Network,
    Prediction,
    ShapeError,
    argmax_class,
    forward,
    load_network,
    network_from_dict,
    network_to_dict,
)
from .geometry import (
    AffineMap,
    LinearConstraint,
    Polytope,
    VRepresentation,
    effective_preactivation_maps,
    enumerate_vertices,
    output_polytope,
    region_hrep,
    remove_redundant,
)
from .explain import (
    ClassUnreachable,
    DifferentRegion,
    SameRegion,
    WhyExplanation,
    explain_why,
    explain_why_not,
    render,
)
from .fixtures import random_network, toy_a

__version__ = "0.1.0"

__all__ = [
    "ActivationSignature",
    "AffineMap",
    "ClassUnreachable",
    "DifferentRegion",
    "DomainError",
    "FormatError",
    "Layer",
    "LinearConstraint",
    "ModelError",
    "Network",
    "Polytope",
    "Prediction",
    "SameRegion",
    "ShapeError",
    "VRepresentation",
    "WhyExplanation",
    "argmax_class",
    "effective_preactivation_maps",
    "enumerate_vertices",
    "explain_why",
    "explain_why_not",
    "forward",
    "load_network",
    "network_from_dict",
    "network_to_dict",
    "output_polytope",
    "random_network",
    "region_hrep",
    "remove_redundant",
    "render",
    "toy_a",
]
