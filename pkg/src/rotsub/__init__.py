"""Discrepancy sums of irrational rotations through renormalizing substitutions.

Modules: ``cf`` (continued fractions and the renormalization map), ``word``
(substitutions and orbit codings), ``stats`` (sums at renormalization times),
``oracle`` (brute-force rotation), ``synth`` (rotation numbers with
prescribed sum growth) and ``cli``.
"""
from . import synth as _synth  # registers the "growth" and "ratio" generators
from .cf import PartialQuotients, RenormState, g_step, is_heavy, renorm_trajectory
from .oracle import code_orbit, sums
from .stats import SumStats, closed_form_special, closed_form_zero, ratio_limit, scan, stats_at
from .synth import GrowthTarget, RatioTarget, growth_theta, heaviness_witness, ratio_theta, x_of_theta
from .word import Renormalization, limit_prefix, zero_orbit_prefix

del _synth

__version__ = "0.1.0"

__all__ = [
    "PartialQuotients",
    "RenormState",
    "g_step",
    "is_heavy",
    "renorm_trajectory",
    "code_orbit",
    "sums",
    "SumStats",
    "scan",
    "closed_form_zero",
    "closed_form_special",
    "ratio_limit",
    "stats_at",
    "GrowthTarget",
    "RatioTarget",
    "growth_theta",
    "ratio_theta",
    "x_of_theta",
    "heaviness_witness",
    "Renormalization",
    "limit_prefix",
    "zero_orbit_prefix",
]
