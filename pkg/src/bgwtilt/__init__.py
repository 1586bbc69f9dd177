"""Tilted offspring families and Galton-Watson trees conditioned on class counts."""

from .dist import INF, IntSet, Pmf, Tail, uniform
from .exact import (CountDP, compatibility_oracle, conditional_law, counterexample_ratio,
                    enumerate_trees, forest_count, forest_count_F, is_achievable,
                    local_limit_distance, root_degree_law, strong_ratio_check)
from .family import (DirParam, SetFamily, TiltParam, critical_distribution, critical_theta,
                     is_aperiodic, is_compatible_param, is_generic, p_dir, solve_critical,
                     theta_max, theta_min, tilde_p)
from .multitype import MultiOffspring, check_offspring, mean_matrix, offspring_sample, rizzolo
from .sample import make_rng, sample_bgw, sample_conditioned, sample_kesten
from .tree import OrderedTree, TypedTree

__version__ = "0.1.0"

__all__ = [
    "INF", "IntSet", "Pmf", "Tail", "uniform",
    "CountDP", "compatibility_oracle", "conditional_law", "counterexample_ratio",
    "enumerate_trees", "forest_count", "forest_count_F", "is_achievable",
    "local_limit_distance", "root_degree_law", "strong_ratio_check",
    "DirParam", "SetFamily", "TiltParam", "critical_distribution", "critical_theta",
    "is_aperiodic", "is_compatible_param", "is_generic", "p_dir", "solve_critical",
    "theta_max", "theta_min", "tilde_p",
    "MultiOffspring", "check_offspring", "mean_matrix", "offspring_sample", "rizzolo",
    "make_rng", "sample_bgw", "sample_conditioned", "sample_kesten",
    "OrderedTree", "TypedTree",
]
