"""Closed-form first-passage analytics and their numerical cross-check."""

from .cdf import CdfCurve, crossing_time_cdf, crossing_time_cdf_curve, mixture_weights, phi_i
from .oracle import operator_inversion_oracle
from .poisson import poisson_cdf, poisson_pmfs, poisson_sf
from .transforms import (
    TransformQuery,
    gamma_transform,
    joint_functional,
    lst_time,
    lst_weight,
    mean_nodes_at_crossing,
    mean_weight_at_crossing,
    pgf_nodes,
    phi,
)

__all__ = [
    "CdfCurve",
    "TransformQuery",
    "crossing_time_cdf",
    "crossing_time_cdf_curve",
    "gamma_transform",
    "joint_functional",
    "lst_time",
    "lst_weight",
    "mean_nodes_at_crossing",
    "mean_weight_at_crossing",
    "mixture_weights",
    "operator_inversion_oracle",
    "pgf_nodes",
    "phi",
    "phi_i",
    "poisson_cdf",
    "poisson_pmfs",
    "poisson_sf",
]
