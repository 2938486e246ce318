"""Tree-level scalar Duffin-Kemmer-Petiau electrodynamics."""

__version__ = "0.1.0"

from .dkp_algebra import BETAS, BetaSet, build_beta_representation, slash, trace_identity, trace_product
from .kinematics import cm_elastic, compton_lab, coulomb_elastic, mandelstam, polarization_basis
from .spinors import bar, projector, solve_u
from .distributions import dkp_feynman, fix_gauge_constant, photon_feynman, singular_order, split

__all__ = [
    "BETAS",
    "BetaSet",
    "bar",
    "build_beta_representation",
    "cm_elastic",
    "compton_lab",
    "coulomb_elastic",
    "dkp_feynman",
    "fix_gauge_constant",
    "mandelstam",
    "photon_feynman",
    "polarization_basis",
    "projector",
    "singular_order",
    "slash",
    "solve_u",
    "split",
    "trace_identity",
    "trace_product",
]
