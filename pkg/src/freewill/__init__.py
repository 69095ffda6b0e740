"""Simulation and analysis of one-sided measurement-dependent hidden-variable models."""

__version__ = "0.1.0"

from .core import RandomStream, UnitVec3, dot, orthonormal_frame, sample_cosine_weighted, sample_uniform_sphere, unit
from .models import HiddenVar, SingletOneSided, ToyTable, UniformBaseline, make_model
from .estimator import estimate_correlator, estimate_joint, marginal_scan
from .chsh import CorrelatorQuad, bound_check, chsh_max, chsh_value, quantum_optimal_settings
from .mdep import free_will, independence_check, m_discrete, m_sphere_pair, m_supremum, mutual_information_onesided
from .lpopt import SolverError, min_m_for_chsh, min_m_for_correlators, simplex_solve

__all__ = [
    "RandomStream", "UnitVec3", "dot", "orthonormal_frame", "sample_cosine_weighted", "sample_uniform_sphere",
    "unit", "HiddenVar", "SingletOneSided", "ToyTable", "UniformBaseline", "make_model", "estimate_correlator",
    "estimate_joint", "marginal_scan", "CorrelatorQuad", "bound_check", "chsh_max", "chsh_value",
    "quantum_optimal_settings", "free_will", "independence_check", "m_discrete", "m_sphere_pair", "m_supremum",
    "mutual_information_onesided", "SolverError", "min_m_for_chsh", "min_m_for_correlators", "simplex_solve",
]
