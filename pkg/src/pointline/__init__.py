"""Point-line configurations with large minimal vertical distance.

Core pieces: the vertical distance and its exact minimum over a
configuration (:mod:`pointline.geometry`), the affine rescalings
(:mod:`pointline.rescale`), the randomized base construction
(:mod:`pointline.lemma1`), self-affine amplification
(:mod:`pointline.recursive`) and gain metrics (:mod:`pointline.analysis`).
"""
from pointline._backend import BACKEND_NAME
from pointline.analysis import GainRecord, gain_report, level_table, upper_bound_sanity
from pointline.geometry import (
    ConfigElement,
    Configuration,
    DistanceWitness,
    min_distance_bruteforce,
    min_distance_grid,
    trivial_configuration,
    verify_claim,
    vertical_distance,
)
from pointline.lemma1 import build_lemma1, derive_params
from pointline.recursive import ComposeParams, RecursionPlan, compose, iterate_theorem, search_base
from pointline.rescale import Rescaler, apply_element, apply_point, rescale_configuration

__all__ = [
    "BACKEND_NAME", "ConfigElement", "Configuration", "DistanceWitness", "GainRecord",
    "ComposeParams", "RecursionPlan", "Rescaler", "apply_element", "apply_point",
    "build_lemma1", "compose", "derive_params", "gain_report", "iterate_theorem", "level_table",
    "min_distance_bruteforce", "min_distance_grid", "rescale_configuration", "search_base",
    "trivial_configuration", "upper_bound_sanity", "verify_claim", "vertical_distance",
]
