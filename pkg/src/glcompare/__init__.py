"""Grothendieck-group level comparison of GL_n(C) real blocks with p-adic multisegment blocks."""

from .multisegments import (
    Multisegment,
    Segment,
    WeightFunction,
    closure_leq,
    dualize,
    elementary_moves,
    enumerate_multisegments,
    open_orbit,
)
from .vogan import GradedOperator, jordan_rep, jordan_type, orbit_dimension
from .weyl import DoubleCosetLabel, Parabolic, double_cosets, dim_Z
from .kl import kl_poly, kl_basis_at_one
from .kgroups import KElement, RealBlock, bz_derivative, pairing, std_to_simple
from .comparison import comparison_block, gamma, gamma_std, infchar_from_weight, parabolics_from_weight
from .functors import TranslationDatum, pushpull, translate, verify_main_diagram

__version__ = "0.1.0"
