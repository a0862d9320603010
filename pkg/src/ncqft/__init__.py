"""Noncommutative quantum field theory toolkit.

Moyal star products, the twisted Fock algebra and its normal ordering,
free star-correlators, and the reduction formula with its noncommutative phase.
"""

__version__ = "0.1.0"

from .fock import ANNIHILATE, CREATE, FockSum, FockWord, Generator, ModeLattice, TwistedFockMatrices, normal_order, vev
from .kinematics import Momentum, SpacetimeDims, ThetaMatrix, wedge
from .lsz import AmputatedGreenFn, ScatteringProcess, lsz_amplitude, nc_phase_factor
from .star import PlaneWaveSymbol, PolySymbol, moyal_bracket, star_plane, star_poly, twisted_product

__all__ = [
    "ANNIHILATE",
    "CREATE",
    "AmputatedGreenFn",
    "FockSum",
    "FockWord",
    "Generator",
    "ModeLattice",
    "Momentum",
    "PlaneWaveSymbol",
    "PolySymbol",
    "ScatteringProcess",
    "SpacetimeDims",
    "ThetaMatrix",
    "TwistedFockMatrices",
    "lsz_amplitude",
    "moyal_bracket",
    "nc_phase_factor",
    "normal_order",
    "star_plane",
    "star_poly",
    "twisted_product",
    "vev",
    "wedge",
]
