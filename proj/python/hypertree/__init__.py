"""Hyperbolic embeddings of trees in the Poincare ball."""

from ._hypertree import (
    Graph,
    InputError,
    TrainConfig,
    TrainingError,
    ValidationError,
    capacity_lower_bound,
    capacity_upper_bound,
    classify_illness,
    dilate,
    distance_gradient,
    evaluate,
    hyperbolic_norm,
    packing_angle,
    poincare_distance,
    train,
)

__all__ = [
    "Graph",
    "InputError",
    "TrainConfig",
    "TrainingError",
    "ValidationError",
    "capacity_lower_bound",
    "capacity_upper_bound",
    "classify_illness",
    "dilate",
    "distance_gradient",
    "evaluate",
    "hyperbolic_norm",
    "packing_angle",
    "poincare_distance",
    "train",
]
