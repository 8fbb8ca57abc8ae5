"""Exact gamma factors for middle supercuspidals of GL(2N) over F_q((t)).

Modules: scalars (exact cyclotomic arithmetic), localfield (truncated Laurent
series), characters, orders, types_supercuspidal, whittaker, rankin
(Rankin-Selberg sums and gamma factors), converse (fingerprints and
recovery) and cli.
"""
from .characters import Session
from .rankin import GammaEngine, IntegrationConfig, gamma, gamma_gl1, gamma_glN
from .types_supercuspidal import MiddleParams, RootParam, SimpleParams

__all__ = ["Session", "GammaEngine", "IntegrationConfig", "gamma", "gamma_gl1", "gamma_glN",
           "MiddleParams", "RootParam", "SimpleParams"]
__version__ = "0.1.0"
